#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "geostat/dataset.hpp"
#include "geostat/errors.hpp"
#include "geostat/likelihood.hpp"

namespace geostat {

// 17 significant digits: enough to round-trip any double, so identical runs
// serialize to identical bytes.
inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Minimal ordered JSON value for the tool outputs: keys keep insertion
// order and doubles print with %.17g, which keeps reruns byte-identical.
// (Vendored nlohmann/json is used for *reading* JSON.)
class Json {
  public:
    static Json object() { return Json(Kind::Object); }
    static Json array() { return Json(Kind::Array); }
    static Json number(double v) {
        Json j(Kind::Number);
        j.text_ = format_g17(v);
        return j;
    }
    static Json integer(std::int64_t v) {
        Json j(Kind::Number);
        j.text_ = std::to_string(v);
        return j;
    }
    static Json boolean(bool v) {
        Json j(Kind::Number);
        j.text_ = v ? "true" : "false";
        return j;
    }
    static Json string(const std::string& s) {
        Json j(Kind::String);
        j.text_ = s;
        return j;
    }

    Json& set(const std::string& key, Json value) {
        members_.emplace_back(key, std::move(value));
        return *this;
    }
    Json& push(Json value) {
        items_.push_back(std::move(value));
        return *this;
    }

    std::string dump(int indent = 0, int depth = 0) const {
        const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
        const std::string end_pad(static_cast<std::size_t>(indent) * depth, ' ');
        const std::string nl = indent > 0 ? "\n" : "";
        const std::string sp = indent > 0 ? " " : "";
        switch (kind_) {
            case Kind::Number:
                return text_;
            case Kind::String:
                return quote(text_);
            case Kind::Array: {
                if (items_.empty()) return "[]";
                std::string out = "[" + nl;
                for (std::size_t i = 0; i < items_.size(); ++i)
                    out += pad + items_[i].dump(indent, depth + 1) +
                           (i + 1 < items_.size() ? "," : "") + nl;
                return out + end_pad + "]";
            }
            case Kind::Object: {
                if (members_.empty()) return "{}";
                std::string out = "{" + nl;
                for (std::size_t i = 0; i < members_.size(); ++i)
                    out += pad + quote(members_[i].first) + ":" + sp +
                           members_[i].second.dump(indent, depth + 1) +
                           (i + 1 < members_.size() ? "," : "") + nl;
                return out + end_pad + "}";
            }
        }
        return "null";
    }

  private:
    enum class Kind { Object, Array, Number, String };
    explicit Json(Kind k) : kind_(k) {}

    static std::string quote(const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                default: out += c;
            }
        }
        return out + "\"";
    }

    Kind kind_;
    std::string text_;
    std::vector<std::pair<std::string, Json>> members_;
    std::vector<Json> items_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw io_error("write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Training/prediction data CSV: header `x,y,z1,...,zp` (or `x,y` for bare
// location files). Strict: every parse problem names its line.
struct CsvDataset {
    SpatialDataset data;
    int p = 0;
};

inline CsvDataset read_dataset_csv(const std::string& path, bool locations_only = false) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw io_error(path + ": empty file");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cols.push_back(cell);
    }
    if (cols.size() < 2 || cols[0] != "x" || cols[1] != "y")
        throw io_error(path + ":1: header must start with x,y");
    const int p = static_cast<int>(cols.size()) - 2;
    if (!locations_only) {
        for (int i = 0; i < p; ++i)
            if (cols[static_cast<std::size_t>(2 + i)] != "z" + std::to_string(i + 1))
                throw io_error(path + ":1: expected column z" + std::to_string(i + 1));
        if (p < 1) throw io_error(path + ":1: no measurement columns");
    }

    std::vector<Location> pts;
    std::vector<double> values;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw io_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (static_cast<int>(row.size()) != 2 + p)
            throw io_error(path + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(2 + p) + " fields, got " + std::to_string(row.size()));
        pts.emplace_back(row[0], row[1]);
        for (int i = 0; i < p; ++i) values.push_back(row[static_cast<std::size_t>(2 + i)]);
    }
    if (pts.empty()) throw io_error(path + ": no data rows");

    CsvDataset out;
    out.p = p;
    if (locations_only || p == 0) {
        out.data.locs = LocationSet(std::move(pts));
        out.data.p = 1;
        out.data.z = Eigen::VectorXd::Zero(out.data.locs.size());
        return out;
    }
    Eigen::VectorXd z(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) z[static_cast<Eigen::Index>(i)] = values[i];
    out.data = SpatialDataset(LocationSet(std::move(pts)), std::move(z), p);
    return out;
}

inline std::string dataset_to_csv(const SpatialDataset& data) {
    std::string out = "x,y";
    for (int i = 1; i <= data.p; ++i) out += ",z" + std::to_string(i);
    out += "\n";
    for (int l = 0; l < data.n(); ++l) {
        out += format_g17(data.locs[l][0]) + "," + format_g17(data.locs[l][1]);
        for (int i = 0; i < data.p; ++i) out += "," + format_g17(data.value(l, i));
        out += "\n";
    }
    return out;
}

// Ordinary least squares of each variable on (1, x, y); returns the
// residual dataset and the 3 coefficients per variable. Used to remove a
// spatially varying mean from ingested data before fitting the zero-mean
// model.
struct DetrendResult {
    SpatialDataset residuals;
    std::vector<Eigen::Vector3d> coefficients;
};

inline DetrendResult detrend_linear(const SpatialDataset& data) {
    const int n = data.n();
    Eigen::MatrixXd design(n, 3);
    for (int l = 0; l < n; ++l) {
        design(l, 0) = 1.0;
        design(l, 1) = data.locs[l][0];
        design(l, 2) = data.locs[l][1];
    }
    DetrendResult out;
    Eigen::VectorXd z = data.z;
    for (int i = 0; i < data.p; ++i) {
        const Eigen::VectorXd zi = data.variable_values(i);
        const Eigen::Vector3d coef =
            (design.transpose() * design).ldlt().solve(design.transpose() * zi);
        out.coefficients.push_back(coef);
        const Eigen::VectorXd res = zi - design * coef;
        for (int l = 0; l < n; ++l) z[static_cast<Eigen::Index>(l) * data.p + i] = res[l];
    }
    out.residuals = SpatialDataset(data.locs, std::move(z), data.p);
    return out;
}

inline constexpr const char* kVersion = "0.1.0";

// Every command serializes one of these next to its primary output, so any
// artifact can be regenerated from its manifest alone.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::uint64_t seed = 0;
    PhaseTimings timings;

    Json to_json() const {
        Json j = Json::object();
        j.set("tool", Json::string(std::string("geostat ") + kVersion));
        j.set("command", Json::string(command));
        Json cfg = Json::object();
        for (const auto& [k, v] : config) cfg.set(k, Json::string(v));
        j.set("config", std::move(cfg));
        j.set("seed", Json::integer(static_cast<std::int64_t>(seed)));
        Json t = Json::object();
        t.set("gen_s", Json::number(timings.generation_s));
        t.set("fact_s", Json::number(timings.factorization_s));
        t.set("comp_s", Json::number(timings.computation_s));
        j.set("timings", std::move(t));
        return j;
    }

    void write(const std::string& primary_output_path) const {
        write_file(primary_output_path + ".manifest.json", to_json().dump(2) + "\n");
    }
};

}  // namespace geostat
