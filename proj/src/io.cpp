#include "ginidyn/io.hpp"

#include "ginidyn/error.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace ginidyn {

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

json dist_to_json(const Dist& d) {
    return json{{"trunc", d.trunc()}, {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}};
}

Dist dist_from_json(const json& j, const Tolerances& tol) {
    if (!j.is_object()) {
        throw Error(ErrorCode::ParseError, "distribution must be a JSON object");
    }
    if (!j.contains("trunc") || !j.at("trunc").is_number_integer() || j.at("trunc").get<long long>() < 0) {
        throw Error(ErrorCode::ParseError, "\"trunc\" must be a nonnegative integer");
    }
    if (!j.contains("probs") || !j.at("probs").is_array()) {
        throw Error(ErrorCode::ParseError, "\"probs\" must be an array");
    }
    const auto trunc = j.at("trunc").get<std::size_t>();
    const auto& probs = j.at("probs");
    if (probs.size() != trunc + 1) {
        std::ostringstream msg;
        msg << "\"probs\" has " << probs.size() << " entries, expected trunc + 1 = " << trunc + 1;
        throw Error(ErrorCode::ParseError, msg.str());
    }
    std::vector<double> p;
    p.reserve(probs.size());
    for (const auto& x : probs) {
        if (!x.is_number()) {
            throw Error(ErrorCode::ParseError, "\"probs\" entries must be numbers");
        }
        p.push_back(x.get<double>());
    }
    return make_dist(std::move(p), tol);
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

Dist read_dist_file(const std::filesystem::path& path, const Tolerances& tol) {
    const json j = read_json_file(path);
    try {
        return dist_from_json(j, tol);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

void write_dist_file(const std::filesystem::path& path, const Dist& d) {
    write_file_atomic(path, dist_to_json(d).dump(2) + "\n");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        }
        out << contents;
        out.flush();
        if (!out) {
            throw Error(ErrorCode::Io, "short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorCode::Io, "cannot move output into " + path.string() + ": " + ec.message());
    }
}

namespace {

std::vector<std::string> column_names(const TrajectoryRecord& record) {
    std::vector<std::string> cols{"t", "mass", "mean", "gini", "w1_equil", "l1_dirac0", "tail_mass"};
    for (Check c : record.bound_checks) {
        const std::string name(check_name(c));
        cols.push_back(name + "_lhs");
        cols.push_back(name + "_rhs");
        cols.push_back(name + "_slack");
    }
    return cols;
}

std::vector<double> row_values(const TrajectoryRow& row) {
    std::vector<double> v{row.t, row.mass, row.mean, row.gini, row.w1_equil, row.l1_dirac0, row.tail_mass};
    for (const auto& b : row.bounds) {
        v.push_back(b.lhs);
        v.push_back(b.rhs);
        v.push_back(b.slack);
    }
    return v;
}

}  // namespace

std::string trajectory_csv(const TrajectoryRecord& record) {
    std::string out;
    const auto cols = column_names(record);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out += (i ? "," : "") + cols[i];
    }
    out += '\n';
    for (const auto& row : record.rows) {
        const auto values = row_values(row);
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += format_double(values[i]);
        }
        out += '\n';
    }
    return out;
}

json trajectory_json(const TrajectoryRecord& record) {
    const auto cols = column_names(record);
    json rows = json::array();
    for (const auto& row : record.rows) {
        const auto values = row_values(row);
        json obj = json::object();
        for (std::size_t i = 0; i < cols.size(); ++i) {
            obj[cols[i]] = values[i];
        }
        rows.push_back(std::move(obj));
    }
    return rows;
}

json sweep_report_json(const SweepReport& report) {
    json out = json::object();
    for (const auto& [name, entry] : report) {
        json witnesses = json::array();
        for (const auto& w : entry.witnesses) {
            witnesses.push_back(dist_to_json(w));
        }
        out[name] = {
            {"count", entry.count},
            {"failures", entry.failures},
            {"min_slack", entry.min_slack},
            {"tight", entry.tight},
            {"witnesses", std::move(witnesses)},
        };
    }
    return out;
}

}  // namespace ginidyn
