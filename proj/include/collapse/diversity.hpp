#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace collapse {

// Entity counts over a closed reference list of size R. Entities absent
// from the map have count zero.
struct FrequencyTable {
    int reference_size = 0;
    std::map<std::string, long long> counts;

    long long total() const;
};

struct LabeledVector {
    std::string label;
    std::vector<double> values;
};

struct VectorSet {
    int dimension = 0;
    std::vector<LabeledVector> vectors;
};

void validate(const VectorSet& set);

// Entity-to-group assignment with per-group weights.
struct GroupPartition {
    std::map<std::string, std::string> entity_group;
    std::map<std::string, double> group_weights;
};

// Shannon diversity H' = -sum p_i ln p_i (natural log); zero-count
// entities contribute nothing.
double shannon_index(const FrequencyTable& table);

// H' / ln(R), in [0, 1].
double pielou_evenness(double h_prime, int reference_size);

// Reference entities with zero observed count; empty means minimal
// representativeness holds empirically.
std::vector<std::string> minimal_representativeness(const FrequencyTable& table,
                                                    const std::vector<std::string>& reference);

// Total-variation distance between the empirical entity distribution and
// the weight-proportional target.
double proportional_deviation(const FrequencyTable& table,
                              const std::map<std::string, double>& weights);

// Counts aggregated by group, then total variation against the
// group-weight-proportional target.
double group_proportional_deviation(const FrequencyTable& table,
                                    const GroupPartition& partition);

constexpr int kDbscanNoise = -1;

enum class DistanceMetric { Euclidean, Cosine };

// Density-based clustering; returns a cluster id per vector, kDbscanNoise
// for noise. Cluster ids are canonicalized by first member position.
std::vector<int> dbscan(const VectorSet& vectors, double eps, int min_pts,
                        DistanceMetric metric = DistanceMetric::Euclidean);

// Nearest reference label within eps, in the given metric; nullopt when
// every reference is farther than eps (the mention is discarded).
std::vector<std::optional<std::string>> resolve_entities(
    const VectorSet& mentions, const VectorSet& reference, double eps,
    DistanceMetric metric = DistanceMetric::Euclidean);

// Counts per resolved label over a reference list of size R.
FrequencyTable frequency_table(const std::vector<std::string>& resolved, int reference_size);

}  // namespace collapse
