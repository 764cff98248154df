#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace dinfo {

/// Row-major layout so that one sample (one point of an embedded cloud) is
/// contiguous in memory.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A multivariate recording: rows are time samples (ascending), columns are
/// channels. All entries are finite; channel names are unique.
struct TimeSeriesSet {
    RowMatrix values;                 // T x M
    std::vector<std::string> names;   // M labels

    Eigen::Index sample_count() const { return values.rows(); }
    Eigen::Index channel_count() const { return values.cols(); }

    /// Index of a named channel; throws if unknown.
    Eigen::Index channel_index(const std::string& name) const;

    /// Validates invariants (finite entries, unique names, T >= 1, M >= 1).
    void validate() const;
};

/// Finite-lag truncation of the conditioning windows used by every rate
/// measure: q lags of the target's past, p lags of the source's past, r lags
/// of each side-information channel, with optional present samples.
struct EmbeddingSpec {
    int target_past_lag = 3;   // q
    int source_past_lag = 3;   // p
    int cond_past_lag = 3;     // r
    bool cond_includes_present = true;
    bool source_includes_present = false;

    /// Largest lag actually consumed; r counts only when cond channels exist.
    int max_lag(bool has_cond) const;

    void validate() const;
};

/// Lagged-embedding point cloud. Every block has the same number of rows; row
/// i of every block is taken from time index max_lag + i of the recording.
struct EmbeddedCloud {
    Eigen::Index n = 0;                 // effective samples
    RowMatrix target_now;               // n x 1
    RowMatrix target_past;              // n x q
    RowMatrix source_past;              // n x p
    std::optional<RowMatrix> source_now;   // n x 1 when requested
    std::optional<RowMatrix> cond_block;   // n x (#cond * (r [+1])) when cond nonempty
};

/// Reads a CSV recording (comma separated, rows = time ascending). With
/// has_header the first row supplies channel names, otherwise labels are
/// generated as x1..xM. Parse failures name the offending row and column.
TimeSeriesSet load_csv(const std::string& path, bool has_header);

/// Writes a recording as CSV with a header row. Numbers use the shortest
/// round-trip representation so repeated runs are byte identical.
void write_csv(const TimeSeriesSet& ts, const std::string& path);

/// Centers and scales every channel to sample mean 0 and unbiased (n-1)
/// standard deviation 1. A constant channel is an error naming the channel.
TimeSeriesSet standardize(const TimeSeriesSet& ts);

/// Builds the lagged-embedding cloud for (source, target, cond) under the
/// spec. Pure re-indexing of ts.values; no arithmetic on the data.
EmbeddedCloud embed(const TimeSeriesSet& ts, const EmbeddingSpec& spec,
                    Eigen::Index source, Eigen::Index target,
                    const std::vector<Eigen::Index>& cond);

}  // namespace dinfo
