#include "invclt/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "invclt/error.hpp"

namespace invclt {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token, std::size_t line) {
    token = trim(token);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line) + ": cannot parse '" + std::string(token) + "' as a number");
    }
    return value;
}

}  // namespace

RawMatrix parse_matrix_csv(std::string_view text) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            row.push_back(parse_double(rest.substr(0, comma), line_no));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::ParseError, "empty matrix");
    return SquareMatrix::from_rows(rows);
}

RawMatrix parse_matrix_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
        throw Error(ErrorCode::ParseError, "expected an object with an \"entries\" array");
    }
    std::vector<std::vector<double>> rows;
    try {
        for (const auto& r : doc["entries"]) rows.push_back(r.get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    if (doc.contains("n")) {
        if (!doc["n"].is_number_integer() || doc["n"].get<long long>() != static_cast<long long>(rows.size())) {
            throw Error(ErrorCode::ParseError, "\"n\" does not match the number of rows");
        }
    }
    if (rows.empty()) throw Error(ErrorCode::ParseError, "empty matrix");
    return SquareMatrix::from_rows(rows);
}

RawMatrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const std::string_view body = trim(text);
    if (path.extension() == ".json" || (!body.empty() && body.front() == '{')) return parse_matrix_json(text);
    return parse_matrix_csv(text);
}

std::string matrix_to_csv(const SquareMatrix& m) {
    std::ostringstream out;
    out.precision(17);
    for (int i = 0; i < m.n(); ++i) {
        for (int j = 0; j < m.n(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
    return out.str();
}

nlohmann::json to_json(const MomentSummary& m) {
    nlohmann::json j;
    j["n"] = m.n;
    j["mu"] = m.mu;
    j["sigma2"] = m.sigma2;
    j["beta"] = m.beta ? nlohmann::json(*m.beta) : nlohmann::json(nullptr);
    return j;
}

}  // namespace invclt
