#include "collapse/diversity.hpp"

#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include "collapse/distributions.hpp"

namespace collapse {

namespace {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

// 1 - cosine similarity; zero vectors are treated as maximally distant.
double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 2.0;
    return 1.0 - dot / std::sqrt(na * nb);
}

double distance(const std::vector<double>& a, const std::vector<double>& b,
                DistanceMetric metric) {
    return metric == DistanceMetric::Euclidean ? euclidean(a, b) : cosine_distance(a, b);
}

}  // namespace

long long FrequencyTable::total() const {
    long long sum = 0;
    for (const auto& [label, count] : counts) {
        if (count < 0) throw UsageError("negative count for entity " + label);
        sum += count;
    }
    return sum;
}

void validate(const VectorSet& set) {
    std::set<std::string> seen;
    for (const LabeledVector& v : set.vectors) {
        if (static_cast<int>(v.values.size()) != set.dimension)
            throw UsageError("vector " + v.label + " has dimension "
                             + std::to_string(v.values.size()) + ", expected "
                             + std::to_string(set.dimension));
        if (!seen.insert(v.label).second)
            throw UsageError("duplicate vector label: " + v.label);
    }
}

double shannon_index(const FrequencyTable& table) {
    const long long total = table.total();
    if (total <= 0) throw UsageError("shannon_index requires a non-empty table");
    double h = 0.0;
    for (const auto& [label, count] : table.counts) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    return std::max(h, 0.0);
}

double pielou_evenness(double h_prime, int reference_size) {
    if (reference_size < 2)
        throw UsageError("pielou_evenness requires a reference list of at least 2 entities");
    return h_prime / std::log(static_cast<double>(reference_size));
}

std::vector<std::string> minimal_representativeness(const FrequencyTable& table,
                                                    const std::vector<std::string>& reference) {
    std::vector<std::string> missing;
    for (const std::string& label : reference) {
        const auto it = table.counts.find(label);
        if (it == table.counts.end() || it->second == 0) missing.push_back(label);
    }
    return missing;
}

double proportional_deviation(const FrequencyTable& table,
                              const std::map<std::string, double>& weights) {
    const long long total = table.total();
    if (total <= 0) throw UsageError("proportional_deviation requires observed counts");
    double weight_sum = 0.0;
    for (const auto& [label, w] : weights) {
        if (w < 0.0) throw UsageError("negative weight for entity " + label);
        weight_sum += w;
    }
    if (!(weight_sum > 0.0)) throw UsageError("weights must not all be zero");

    double tv = 0.0;
    for (const auto& [label, w] : weights) {
        const auto it = table.counts.find(label);
        const double p = it == table.counts.end()
                             ? 0.0
                             : static_cast<double>(it->second) / static_cast<double>(total);
        tv += std::abs(p - w / weight_sum);
    }
    // counted entities missing from the weight map target probability 0
    for (const auto& [label, count] : table.counts) {
        if (count == 0 || weights.count(label)) continue;
        tv += static_cast<double>(count) / static_cast<double>(total);
    }
    return 0.5 * tv;
}

double group_proportional_deviation(const FrequencyTable& table,
                                    const GroupPartition& partition) {
    const long long total = table.total();
    if (total <= 0) throw UsageError("group_proportional_deviation requires observed counts");

    std::map<std::string, long long> group_counts;
    for (const auto& [group, weight] : partition.group_weights) {
        if (weight < 0.0) throw UsageError("negative weight for group " + group);
        group_counts[group] = 0;
    }
    for (const auto& [label, count] : table.counts) {
        if (count == 0) continue;
        const auto it = partition.entity_group.find(label);
        if (it == partition.entity_group.end())
            throw UsageError("entity " + label + " has positive count but no group");
        group_counts[it->second] += count;
    }

    std::map<std::string, double> weights_by_group;
    for (const auto& [group, count] : group_counts) {
        const auto it = partition.group_weights.find(group);
        weights_by_group[group] = it == partition.group_weights.end() ? 0.0 : it->second;
    }
    double weight_sum = 0.0;
    for (const auto& [group, w] : weights_by_group) weight_sum += w;
    if (!(weight_sum > 0.0)) throw UsageError("group weights must not all be zero");

    double tv = 0.0;
    for (const auto& [group, count] : group_counts) {
        const double p = static_cast<double>(count) / static_cast<double>(total);
        tv += std::abs(p - weights_by_group.at(group) / weight_sum);
    }
    return 0.5 * tv;
}

std::vector<int> dbscan(const VectorSet& vectors, double eps, int min_pts,
                        DistanceMetric metric) {
    validate(vectors);
    if (!(eps > 0.0)) throw UsageError("dbscan eps must be > 0");
    if (min_pts < 1) throw UsageError("dbscan min_pts must be >= 1");
    const std::size_t n = vectors.vectors.size();
    if (n == 0) throw UsageError("dbscan requires a non-empty vector set");

    const auto neighbors_of = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j)
            if (distance(vectors.vectors[i].values, vectors.vectors[j].values, metric) <= eps)
                out.push_back(j);  // includes i itself
        return out;
    };

    constexpr int kUnvisited = -2;
    std::vector<int> labels(n, kUnvisited);
    int next_cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited) continue;
        std::vector<std::size_t> neighbors = neighbors_of(i);
        if (neighbors.size() < static_cast<std::size_t>(min_pts)) {
            labels[i] = kDbscanNoise;
            continue;
        }
        const int cluster = next_cluster++;
        labels[i] = cluster;
        std::deque<std::size_t> frontier(neighbors.begin(), neighbors.end());
        while (!frontier.empty()) {
            const std::size_t j = frontier.front();
            frontier.pop_front();
            if (labels[j] == kDbscanNoise) labels[j] = cluster;  // border point
            if (labels[j] != kUnvisited) continue;
            labels[j] = cluster;
            std::vector<std::size_t> more = neighbors_of(j);
            if (more.size() >= static_cast<std::size_t>(min_pts))
                frontier.insert(frontier.end(), more.begin(), more.end());
        }
    }
    return labels;
}

std::vector<std::optional<std::string>> resolve_entities(const VectorSet& mentions,
                                                         const VectorSet& reference,
                                                         double eps, DistanceMetric metric) {
    validate(mentions);
    validate(reference);
    if (mentions.dimension != reference.dimension)
        throw UsageError("mention and reference vectors must share a dimension");
    if (reference.vectors.empty()) throw UsageError("reference vector set is empty");

    std::vector<std::optional<std::string>> out;
    out.reserve(mentions.vectors.size());
    for (const LabeledVector& m : mentions.vectors) {
        double best = std::numeric_limits<double>::infinity();
        const LabeledVector* match = nullptr;
        for (const LabeledVector& r : reference.vectors) {
            const double d = distance(m.values, r.values, metric);
            if (d < best) {
                best = d;
                match = &r;
            }
        }
        if (match != nullptr && best <= eps)
            out.emplace_back(match->label);
        else
            out.emplace_back(std::nullopt);
    }
    return out;
}

FrequencyTable frequency_table(const std::vector<std::string>& resolved, int reference_size) {
    FrequencyTable table;
    table.reference_size = reference_size;
    for (const std::string& label : resolved) ++table.counts[label];
    return table;
}

}  // namespace collapse
