#include "dualcause/io.hpp"

#include "dualcause/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace dualcause {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

bool parse_number(std::string field, double& value) {
    const auto first = field.find_first_not_of(" \t");
    const auto last = field.find_last_not_of(" \t");
    if (first == std::string::npos) {
        return false;
    }
    field = field.substr(first, last - first + 1);
    errno = 0;
    char* end = nullptr;
    value = std::strtod(field.c_str(), &end);
    return errno == 0 && end == field.c_str() + field.size() && std::isfinite(value);
}

nlohmann::json mask_json(NodeMask m) { return mask_to_indices(m); }

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SampleMatrix read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const auto fields = split_fields(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            numeric = numeric && parse_number(fields[c], row[c]);
        }
        if (!numeric) {
            if (rows.empty() && width == 0) {
                // header
                width = fields.size();
                continue;
            }
            throw ParseError("row is not numeric", line_no);
        }
        if (width == 0) {
            width = row.size();
        }
        if (row.size() != width) {
            throw ParseError("expected " + std::to_string(width) + " columns, found " + std::to_string(row.size()),
                             line_no);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("no data rows", line_no);
    }
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return SampleMatrix(std::move(m));
}

SampleMatrix read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string(), 0);
    }
    return read_csv(in);
}

void write_csv(std::ostream& out, const SampleMatrix& data, bool header) {
    const auto& x = data.rows();
    if (header) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            out << (c ? "," : "") << "X" << c;
        }
        out << '\n';
    }
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            out << (c ? "," : "") << format_double(x(r, c));
        }
        out << '\n';
    }
}

nlohmann::json to_json(const RegimeTag& r) {
    nlohmann::json j{{"kind", r.name()}};
    if (r.kind == RegimeTag::Kind::PartialEV) {
        j["i"] = r.i;
        j["j"] = r.j;
    }
    return j;
}

RegimeTag regime_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        return RegimeTag::parse(j.get<std::string>());
    }
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "partial_ev") {
        return RegimeTag::partial_ev(j.at("i").get<std::size_t>(), j.at("j").get<std::size_t>());
    }
    return RegimeTag::parse(kind);
}

nlohmann::json to_json(const HypothesisClass& c) {
    nlohmann::json j{{"direction", c.direction == Direction::IBeforeJ ? "i_before_j" : "j_before_i"}};
    j["parents_i"] = c.parents_i ? mask_json(*c.parents_i) : nlohmann::json(nullptr);
    j["parents_j"] = c.parents_j ? mask_json(*c.parents_j) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const LinearScm& scm) {
    const auto d = static_cast<Eigen::Index>(scm.dim());
    nlohmann::json weights = nlohmann::json::array();
    for (Eigen::Index r = 0; r < d; ++r) {
        std::vector<double> row(static_cast<std::size_t>(d));
        for (Eigen::Index c = 0; c < d; ++c) {
            row[static_cast<std::size_t>(c)] = scm.weights()(r, c);
        }
        weights.push_back(row);
    }
    std::vector<double> variances(scm.variances().data(), scm.variances().data() + d);
    return {{"d", scm.dim()},
            {"order", scm.order().perm()},
            {"weights", weights},
            {"variances", variances},
            {"regime", to_json(scm.regime())}};
}

LinearScm scm_from_json(const nlohmann::json& j) {
    const auto d = j.at("d").get<std::size_t>();
    const auto order = j.at("order").get<std::vector<std::size_t>>();
    const auto weights = j.at("weights").get<std::vector<std::vector<double>>>();
    const auto variances = j.at("variances").get<std::vector<double>>();
    if (order.size() != d || weights.size() != d || variances.size() != d) {
        throw InvalidArgument("SCM document dimensions disagree");
    }
    const auto dd = static_cast<Eigen::Index>(d);
    Matrix b(dd, dd);
    Vector omega(dd);
    for (std::size_t r = 0; r < d; ++r) {
        if (weights[r].size() != d) {
            throw InvalidArgument("SCM weight matrix must be square");
        }
        for (std::size_t c = 0; c < d; ++c) {
            b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = weights[r][c];
        }
        omega(static_cast<Eigen::Index>(r)) = variances[r];
    }
    const RegimeTag regime = j.contains("regime") ? regime_from_json(j.at("regime")) : RegimeTag::general();
    return LinearScm(std::move(b), std::move(omega), CompleteOrdering(order), regime);
}

nlohmann::json to_json(const EffectEstimate& e) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& group : e.provenance) {
        nlohmann::json g = nlohmann::json::array();
        for (const auto& c : group) {
            g.push_back(to_json(c));
        }
        classes.push_back(g);
    }
    return {{"regime", to_json(e.regime)}, {"i", e.i},           {"j", e.j},
            {"n", e.n},                    {"values", e.values}, {"classes", classes},
            {"optimum", e.optimum}};
}

nlohmann::json to_json(const ConfidenceRegion& r) {
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& iv : r.intervals()) {
        intervals.push_back({iv.lower, iv.upper});
    }
    return {{"alpha", r.alpha()},
            {"n", r.n()},
            {"regime", to_json(r.regime())},
            {"intervals", intervals},
            {"zero_atom", r.zero_atom()}};
}

}  // namespace dualcause
