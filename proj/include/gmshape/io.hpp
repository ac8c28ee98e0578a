#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "gmshape/model.hpp"
#include "gmshape/moments.hpp"
#include "gmshape/pipeline.hpp"
#include "gmshape/prony.hpp"

namespace gmshape {

/// Shortest 17-significant-digit decimal form; round-trips doubles losslessly.
std::string format_g17(double v);

std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t hash_file(const std::string& path);

// model JSON: {"d", "k", "weights", "means", "form"}
MixtureModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const MixtureModel& model);
MixtureModel load_model(const std::string& path);
void save_model(const MixtureModel& model, const std::string& path);

// delta samples: headerless CSV, one value per line
void save_deltas(const DeltaSamples& samples, const std::string& path);
DeltaSamples load_deltas(const std::string& path);

// moments / power sums: order,value[,stderr] per line
void save_moments(const MomentVector& m, const std::string& path);
MomentVector load_moments(const std::string& path);
void save_power_sums(const PowerSums& p, const std::string& path);
PowerSums load_power_sums(const std::string& path);

// points: one point per row, comma-separated coordinates
void save_points(const Eigen::MatrixXd& points, const std::string& path);

// nodes: weight,node per line
void save_nodes(const NodeSet& nodes, const std::string& path);

void save_report(const RecoveryReport& report, const std::string& path);
nlohmann::json report_to_json(const RecoveryReport& report);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    long count = 0;
};
std::vector<HistogramBin> histogram(const std::vector<double>& values, int bins);
void save_histogram(const std::vector<HistogramBin>& bins, const std::string& path);

}  // namespace gmshape
