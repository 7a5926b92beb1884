#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "spamnet/estimator.hpp"
#include "spamnet/rates.hpp"
#include "spamnet/simulate.hpp"
#include "spamnet/timeseries.hpp"

namespace spamnet {

TimeSeries load_csv(const std::string& path);
void save_csv(const std::string& path, const TimeSeries& ts);

/// Sectioned key = value configuration. '#' and ';' start comments.
/// Unknown sections or keys are hard errors.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    long get_int(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key,
                 long fallback) const;
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const;
    std::vector<double> get_double_list(const std::string& section,
                                        const std::string& key) const;
    std::vector<long> get_int_list(const std::string& section,
                                   const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& section,
                                             const std::string& key) const;

    bool has_section(const std::string& section) const;
    void require_section(const std::string& section) const;

    const std::string& text() const { return text_; }

private:
    void validate_schema() const;

    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string text_;
    std::string origin_;
};

/// FNV-1a 64-bit content hash, hex-encoded; used in output manifests.
std::string content_hash(const std::string& text);

void save_network_fit(const std::string& path, const NetworkFit& fit);
NetworkFit load_network_fit(const std::string& path);

void save_ground_truth(const std::string& path, const GroundTruth& truth);

void save_rates_report(const std::string& path, const RatesReport& rep);

void save_grid_rows(const std::string& path, const std::vector<GridRow>& rows);
void save_grid_rows_jsonl(const std::string& path, const std::vector<GridRow>& rows);

void save_labels_csv(const std::string& path, const std::vector<int>& labels);
void save_adjacency_csv(const std::string& path, const Eigen::MatrixXi& A);
Eigen::MatrixXd load_matrix_csv(const std::string& path);

void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& config_text, std::uint64_t seed,
                    const std::string& data_hash = "");

extern const char* kVersion;

}  // namespace spamnet
