#pragma once

#include "aperiodica/point_sample.hpp"

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <string>

namespace aperiodica {

struct EuclideanCps;
struct Window;
struct AnalysisReport;
struct RoundTripReport;

// Point-sample file. Numbers travel as strings to keep exact values exact.
PointSample load_sample(std::istream& in);
PointSample load_sample_file(const std::string& path);
void save_sample(const PointSample& sample, std::ostream& out);
void save_sample_file(const PointSample& sample, const std::string& path);

EuclideanCps load_cps_file(const std::string& path);
void save_cps_file(const EuclideanCps& cps, const std::string& path);

Window load_window_file(const std::string& path);
void save_window_file(const Window& window, const std::string& path);

std::string analysis_report_json(const AnalysisReport& report);
std::string roundtrip_report_json(const RoundTripReport& report);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace aperiodica
