#include "cmacg/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cmacg::io {

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

std::vector<std::vector<double>> parse_csv_numbers(std::string_view text) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos || line[first] == '#') {
            if (eol == text.size()) break;
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            std::string field(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start));
            const auto b = field.find_first_not_of(" \t");
            const auto e = field.find_last_not_of(" \t");
            if (b == std::string::npos) parse_fail("empty field on line " + std::to_string(line_no));
            field = field.substr(b, e - b + 1);
            double v = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (res.ec != std::errc() || res.ptr != field.data() + field.size())
                parse_fail("invalid number '" + field + "' on line " + std::to_string(line_no));
            row.push_back(v);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(row));
        if (eol == text.size()) break;
    }
    return rows;
}

void append_row(std::string& out, const ComplexMatrix& a, Eigen::Index i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        if (j > 0) out += ',';
        out += format_double(a(i, j).real());
        out += ',';
        out += format_double(a(i, j).imag());
    }
    out += '\n';
}

} // namespace

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    throw Error(ErrorCode::InvalidArgument, "unknown format '" + std::string(name) + "'");
}

Format format_from_extension(const std::filesystem::path& path) {
    return path.extension() == ".json" ? Format::Json : Format::Csv;
}

std::string format_double(double x) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string matrix_to_csv(const ComplexMatrix& a) {
    std::string out;
    for (Eigen::Index i = 0; i < a.rows(); ++i) append_row(out, a, i);
    return out;
}

ComplexMatrix matrix_from_csv(std::string_view text) {
    const auto rows = parse_csv_numbers(text);
    if (rows.empty()) parse_fail("matrix file has no rows");
    const std::size_t width = rows.front().size();
    if (width == 0 || width % 2 != 0) parse_fail("row width must be an even number of re,im fields");
    ComplexMatrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width / 2));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width)
            parse_fail("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                       " fields, expected " + std::to_string(width));
        for (std::size_t j = 0; j < width / 2; ++j)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(rows[i][2 * j], rows[i][2 * j + 1]);
    }
    return a;
}

std::string draws_to_csv(const std::vector<ComplexMatrix>& draws) {
    std::string out;
    for (std::size_t k = 0; k < draws.size(); ++k) {
        for (Eigen::Index i = 0; i < draws[k].rows(); ++i) {
            out += std::to_string(k);
            out += ',';
            append_row(out, draws[k], i);
        }
    }
    return out;
}

std::vector<ComplexMatrix> draws_from_csv(std::string_view text, std::size_t m, std::size_t r) {
    const auto rows = parse_csv_numbers(text);
    const std::size_t width = 1 + 2 * r;
    if (m == 0 || r == 0) parse_fail("dimensions must be positive");
    if (rows.size() % m != 0)
        parse_fail(std::to_string(rows.size()) + " rows is not a multiple of m=" + std::to_string(m));
    std::vector<ComplexMatrix> draws(rows.size() / m,
                                     ComplexMatrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(r)));
    for (std::size_t line = 0; line < rows.size(); ++line) {
        const auto& row = rows[line];
        if (row.size() != width)
            parse_fail("row " + std::to_string(line + 1) + " has " + std::to_string(row.size()) +
                       " fields, expected " + std::to_string(width));
        const std::size_t k = line / m;
        if (row[0] != static_cast<double>(k))
            parse_fail("row " + std::to_string(line + 1) + " has draw_index " + format_double(row[0]) +
                       ", expected " + std::to_string(k));
        for (std::size_t j = 0; j < r; ++j)
            draws[k](static_cast<Eigen::Index>(line % m), static_cast<Eigen::Index>(j)) =
                Complex(row[1 + 2 * j], row[2 + 2 * j]);
    }
    return draws;
}

nlohmann::json matrix_to_json(const ComplexMatrix& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back({a(i, j).real(), a(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array() || j.front().empty())
        parse_fail("matrix must be a non-empty array of non-empty rows");
    const std::size_t cols = j.front().size();
    ComplexMatrix a(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != cols)
            parse_fail("row " + std::to_string(i) + " has the wrong number of entries");
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& e = row[c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                parse_fail("entry (" + std::to_string(i) + "," + std::to_string(c) + ") must be [re, im]");
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return a;
}

std::string draws_to_json(const std::vector<ComplexMatrix>& draws) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : draws) arr.push_back(matrix_to_json(d));
    return arr.dump() + "\n";
}

std::vector<ComplexMatrix> draws_from_json(std::string_view text, std::size_t m, std::size_t r) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        parse_fail(e.what());
    }
    if (!j.is_array()) parse_fail("draws file must hold a JSON array");
    std::vector<ComplexMatrix> draws;
    for (std::size_t k = 0; k < j.size(); ++k) {
        ComplexMatrix a = matrix_from_json(j[k]);
        if (a.rows() != static_cast<Eigen::Index>(m) || a.cols() != static_cast<Eigen::Index>(r))
            parse_fail("draw " + std::to_string(k) + " is not " + std::to_string(m) + "x" + std::to_string(r));
        draws.push_back(std::move(a));
    }
    return draws;
}

std::string write_matrix(const ComplexMatrix& a, Format f) {
    return f == Format::Csv ? matrix_to_csv(a) : matrix_to_json(a).dump() + "\n";
}

ComplexMatrix read_matrix(std::string_view text, Format f) {
    if (f == Format::Csv) return matrix_from_csv(text);
    try {
        return matrix_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        parse_fail(e.what());
    }
}

std::string write_draws(const std::vector<ComplexMatrix>& draws, Format f) {
    return f == Format::Csv ? draws_to_csv(draws) : draws_to_json(draws);
}

std::vector<ComplexMatrix> read_draws(std::string_view text, Format f, std::size_t m, std::size_t r) {
    return f == Format::Csv ? draws_from_csv(text, m, r) : draws_from_json(text, m, r);
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoError, "SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(ErrorCode::IoError, "write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot rename onto '" + path.string() + "'");
    }
}

} // namespace cmacg::io
