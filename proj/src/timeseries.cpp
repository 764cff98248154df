#include "dinfo/timeseries.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dinfo {

namespace {

std::string csv_number(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

bool parse_double(const std::string& field, double& out) {
    const char* s = field.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(s, &end);
    if (end == s || errno == ERANGE) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

Eigen::Index TimeSeriesSet::channel_index(const std::string& name) const {
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(names.size()); ++i)
        if (names[static_cast<std::size_t>(i)] == name) return i;
    throw std::invalid_argument("unknown channel: " + name);
}

void TimeSeriesSet::validate() const {
    if (values.rows() < 1 || values.cols() < 1)
        throw std::invalid_argument("time series must have T >= 1 and M >= 1");
    if (static_cast<Eigen::Index>(names.size()) != values.cols())
        throw std::invalid_argument("channel name count does not match channel count");
    std::set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second)
            throw std::invalid_argument("duplicate channel name: " + n);
    if (!values.allFinite())
        throw std::invalid_argument("time series contains non-finite entries");
}

int EmbeddingSpec::max_lag(bool has_cond) const {
    int m = std::max(target_past_lag, source_past_lag);
    if (has_cond) m = std::max(m, cond_past_lag);
    return m;
}

void EmbeddingSpec::validate() const {
    if (target_past_lag < 1 || source_past_lag < 1 || cond_past_lag < 1)
        throw std::invalid_argument("embedding lags must be >= 1");
}

TimeSeriesSet load_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::string line;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::size_t line_no = 0;   // physical line in the file
    std::size_t data_row = 0;  // 1-based data row for error messages

    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && has_header) {
            names = split_csv_row(line);
            continue;
        }
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        auto fields = split_csv_row(line);
        ++data_row;
        if (width == 0) {
            width = fields.size();
        } else if (fields.size() != width) {
            std::ostringstream msg;
            msg << path << ": row " << data_row << " has " << fields.size()
                << " fields, expected " << width;
            throw std::runtime_error(msg.str());
        }
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            double v;
            if (!parse_double(fields[c], v)) {
                std::ostringstream msg;
                msg << path << ": parse error at row " << data_row << ", column " << (c + 1)
                    << ": \"" << fields[c] << "\" is not a number";
                throw std::runtime_error(msg.str());
            }
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << path << ": non-finite value at row " << data_row << ", column " << (c + 1);
                throw std::runtime_error(msg.str());
            }
            row[c] = v;
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw std::runtime_error(path + ": empty data");
    if (has_header && names.size() != width)
        throw std::runtime_error(path + ": header width does not match data width");

    TimeSeriesSet ts;
    ts.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < width; ++c)
            ts.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    if (has_header) {
        ts.names = names;
    } else {
        for (std::size_t c = 0; c < width; ++c) ts.names.push_back("x" + std::to_string(c + 1));
    }
    ts.validate();
    return ts;
}

void write_csv(const TimeSeriesSet& ts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    for (std::size_t c = 0; c < ts.names.size(); ++c) {
        if (c) out << ',';
        out << ts.names[c];
    }
    out << '\n';
    for (Eigen::Index r = 0; r < ts.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < ts.values.cols(); ++c) {
            if (c) out << ',';
            out << csv_number(ts.values(r, c));
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

TimeSeriesSet standardize(const TimeSeriesSet& ts) {
    ts.validate();
    const Eigen::Index t = ts.sample_count();
    if (t < 2) throw std::invalid_argument("standardize needs at least 2 samples");

    TimeSeriesSet out = ts;
    for (Eigen::Index c = 0; c < ts.channel_count(); ++c) {
        const double mean = ts.values.col(c).mean();
        const double ss = (ts.values.col(c).array() - mean).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(t - 1));
        if (sd == 0.0)
            throw std::invalid_argument("constant channel cannot be standardized: " +
                                        ts.names[static_cast<std::size_t>(c)]);
        out.values.col(c) = (ts.values.col(c).array() - mean) / sd;
    }
    return out;
}

EmbeddedCloud embed(const TimeSeriesSet& ts, const EmbeddingSpec& spec,
                    Eigen::Index source, Eigen::Index target,
                    const std::vector<Eigen::Index>& cond) {
    ts.validate();
    spec.validate();
    const Eigen::Index m = ts.channel_count();
    auto check_channel = [m](Eigen::Index c) {
        if (c < 0 || c >= m) throw std::invalid_argument("channel index out of range");
    };
    check_channel(source);
    check_channel(target);
    if (source == target) throw std::invalid_argument("source and target must differ");
    for (Eigen::Index c : cond) {
        check_channel(c);
        if (c == source || c == target)
            throw std::invalid_argument("conditioning set must exclude source and target");
    }

    const int max_lag = spec.max_lag(!cond.empty());
    const Eigen::Index n = ts.sample_count() - max_lag;
    if (n < 1) throw std::invalid_argument("insufficient samples for requested lags");

    EmbeddedCloud cloud;
    cloud.n = n;
    cloud.target_now.resize(n, 1);
    cloud.target_past.resize(n, spec.target_past_lag);
    cloud.source_past.resize(n, spec.source_past_lag);
    if (spec.source_includes_present) cloud.source_now.emplace(n, 1);
    const int cond_width_per = spec.cond_past_lag + (spec.cond_includes_present ? 1 : 0);
    if (!cond.empty())
        cloud.cond_block.emplace(n, static_cast<Eigen::Index>(cond.size()) * cond_width_per);

    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index t = max_lag + i;
        cloud.target_now(i, 0) = ts.values(t, target);
        for (int l = 1; l <= spec.target_past_lag; ++l)
            cloud.target_past(i, l - 1) = ts.values(t - l, target);
        for (int l = 1; l <= spec.source_past_lag; ++l)
            cloud.source_past(i, l - 1) = ts.values(t - l, source);
        if (cloud.source_now) (*cloud.source_now)(i, 0) = ts.values(t, source);
        if (cloud.cond_block) {
            Eigen::Index col = 0;
            for (Eigen::Index z : cond) {
                if (spec.cond_includes_present) (*cloud.cond_block)(i, col++) = ts.values(t, z);
                for (int l = 1; l <= spec.cond_past_lag; ++l)
                    (*cloud.cond_block)(i, col++) = ts.values(t - l, z);
            }
        }
    }
    return cloud;
}

}  // namespace dinfo
