#include "dpocs/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "dpocs/error.hpp"

namespace dpocs::io {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string where(const fs::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError(path.string() + ": cannot open for reading");
    return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw IoError(path.string() + ": write failed");
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view field, const fs::path& path, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
        throw IoError(where(path, line) + ": invalid number '" + std::string(field) + "'");
    return v;
}

std::size_t parse_count(std::string_view field, const fs::path& path, std::size_t line) {
    field = trim(field);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
        throw IoError(where(path, line) + ": invalid count '" + std::string(field) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// Non-blank lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_lines(const fs::path& path) {
    auto in = open_in(path);
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no)
        if (!trim(line).empty()) lines.emplace_back(no, line);
    return lines;
}

void write_row(std::ostream& out, std::span<const double> row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ',';
        out << format_double(row[c]);
    }
    out << '\n';
}

// ----------------------------------------------------------------------------
// Schema helpers

std::string type_name(const json& j) { return j.type_name(); }

class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object())
            throw SchemaError(path_.empty() ? "/" : path_, "expected object, got " + type_name(j));
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& required(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw SchemaError(child_path(key), "missing required key");
        return j_.at(key);
    }

    const json* optional(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    double number(const std::string& key, double fallback, bool required_key = false) {
        const json* v = required_key ? &required(key) : optional(key);
        if (!v) return fallback;
        if (!v->is_number()) throw SchemaError(child_path(key), "expected number, got " + type_name(*v));
        return v->get<double>();
    }

    double nonneg(const std::string& key, double fallback, bool required_key = false) {
        const double v = number(key, fallback, required_key);
        if (!(v >= 0.0) || !std::isfinite(v)) throw SchemaError(child_path(key), "expected finite number >= 0");
        return v;
    }

    std::uint64_t count(const std::string& key, std::uint64_t fallback, bool required_key = false) {
        const json* v = required_key ? &required(key) : optional(key);
        if (!v) return fallback;
        // Documents built in code store small literals as signed integers.
        const bool ok = v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0);
        if (!ok) throw SchemaError(child_path(key), "expected non-negative integer, got " + type_name(*v));
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = optional(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw SchemaError(child_path(key), "expected boolean, got " + type_name(*v));
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback, bool required_key = false) {
        const json* v = required_key ? &required(key) : optional(key);
        if (!v) return fallback;
        if (!v->is_string()) throw SchemaError(child_path(key), "expected string, got " + type_name(*v));
        return v->get<std::string>();
    }

    // Array of finite numbers; nulls map to `null_value` when it is not NaN.
    std::vector<double> numbers(const std::string& key, double null_value = std::nan("")) {
        const json& v = required(key);
        if (!v.is_array() || v.empty())
            throw SchemaError(child_path(key), "expected non-empty array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& e = v[i];
            if (e.is_null() && !std::isnan(null_value)) {
                out.push_back(null_value);
            } else if (e.is_number()) {
                out.push_back(e.get<double>());
            } else {
                throw SchemaError(child_path(key) + "/" + std::to_string(i), "expected number");
            }
        }
        return out;
    }

    // Scalar that may be null (unbounded).
    double bound(const std::string& key, double null_value) {
        const json& v = required(key);
        if (v.is_null()) return null_value;
        if (!v.is_number()) throw SchemaError(child_path(key), "expected number or null");
        return v.get<double>();
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw SchemaError(child_path(key), "unknown key");
    }

    std::string child_path(const std::string& key) const { return path_ + "/" + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

// Wraps library construction errors so they point at the JSON node.
template <typename F>
auto at_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const InvalidArgument& e) {
        throw SchemaError(path.empty() ? "/" : path, e.what());
    }
}

json bound_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json bounds_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(bound_json(x));
    return a;
}

const char* filter_name(FbpFilter f) { return f == FbpFilter::Hann ? "hann" : "ram-lak"; }

}  // namespace

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw IoError("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

// ----------------------------------------------------------------------------

DenseMatrix read_csv_matrix(const fs::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw IoError(path.string() + ": empty CSV file");
    DenseMatrix m;
    for (const auto& [no, text] : lines) {
        const auto fields = split(text);
        if (m.rows == 0) m.cols = fields.size();
        if (fields.size() != m.cols)
            throw IoError(where(path, no) + ": expected " + std::to_string(m.cols) + " fields, got " +
                          std::to_string(fields.size()));
        for (auto f : fields) m.data.push_back(parse_double(f, path, no));
        ++m.rows;
    }
    return m;
}

void write_csv_matrix(const fs::path& path, const DenseMatrix& m) {
    if (m.data.size() != m.rows * m.cols) throw InvalidArgument("write_csv_matrix: inconsistent shape");
    auto out = open_out(path);
    for (std::size_t r = 0; r < m.rows; ++r)
        write_row(out, std::span(m.data).subspan(r * m.cols, m.cols));
    close_checked(out, path);
}

Vector read_csv_vector(const fs::path& path) {
    auto m = read_csv_matrix(path);
    if (m.rows != 1 && m.cols != 1)
        throw IoError(path.string() + ": expected a single row or column, got " + std::to_string(m.rows) +
                      "x" + std::to_string(m.cols));
    return Vector(std::move(m.data));
}

void write_csv_vector(const fs::path& path, std::span<const double> v) {
    write_csv_matrix(path, DenseMatrix{v.size(), 1, std::vector<double>(v.begin(), v.end())});
}

SparseMatrix read_sparse_csv(const fs::path& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 2) throw IoError(path.string() + ": triplet CSV needs a two-line header");
    const auto shape = split(lines[0].second);
    if (shape.size() != 2) throw IoError(where(path, lines[0].first) + ": expected 'rows,cols'");
    const auto rows = parse_count(shape[0], path, lines[0].first);
    const auto cols = parse_count(shape[1], path, lines[0].first);
    const auto nnz_fields = split(lines[1].second);
    if (nnz_fields.size() != 1) throw IoError(where(path, lines[1].first) + ": expected 'nnz'");
    const auto nnz = parse_count(nnz_fields[0], path, lines[1].first);
    if (lines.size() - 2 != nnz)
        throw IoError(path.string() + ": header declares " + std::to_string(nnz) + " entries, file has " +
                      std::to_string(lines.size() - 2));
    std::vector<Triplet> t;
    t.reserve(nnz);
    for (std::size_t k = 2; k < lines.size(); ++k) {
        const auto& [no, text] = lines[k];
        const auto f = split(text);
        if (f.size() != 3) throw IoError(where(path, no) + ": expected 'row,col,value'");
        const auto r = parse_count(f[0], path, no);
        const auto c = parse_count(f[1], path, no);
        if (r >= rows || c >= cols) throw IoError(where(path, no) + ": index outside declared shape");
        t.push_back({r, c, parse_double(f[2], path, no)});
    }
    try {
        return SparseMatrix::from_triplets(rows, cols, std::move(t));
    } catch (const InvalidArgument& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_sparse_csv(const fs::path& path, const SparseMatrix& A) {
    auto out = open_out(path);
    out << A.rows() << ',' << A.cols() << '\n' << A.nnz() << '\n';
    for (const auto& t : A.triplets()) out << t.row << ',' << t.col << ',' << format_double(t.value) << '\n';
    close_checked(out, path);
}

SparseMatrix read_matrix(const fs::path& path) {
    const auto lines = read_lines(path);
    if (lines.size() >= 2 && split(lines[0].second).size() == 2 && split(lines[1].second).size() == 1 &&
        lines[0].second.find('.') == std::string::npos)
        return read_sparse_csv(path);
    auto m = read_csv_matrix(path);
    try {
        return SparseMatrix::from_dense(m.rows, m.cols, m.data);
    } catch (const InvalidArgument& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

// ----------------------------------------------------------------------------

void write_pgm(const fs::path& path, const Image& img) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out << "P5\n" << img.n << ' ' << img.n << "\n65535\n";
    std::vector<unsigned char> bytes;
    bytes.reserve(img.pixels.size() * 2);
    for (double v : img.pixels) {
        const auto s = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
        bytes.push_back(static_cast<unsigned char>(s >> 8));
        bytes.push_back(static_cast<unsigned char>(s & 0xff));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    close_checked(out, path);
}

Image read_pgm(const fs::path& path) {
    auto in = open_in(path, std::ios::in | std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;

    auto fail = [&](const std::string& what) -> IoError {
        return IoError(path.string() + ": offset " + std::to_string(pos) + ": " + what);
    };
    auto skip_space = [&] {
        while (pos < data.size()) {
            if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto header_int = [&]() -> std::size_t {
        skip_space();
        const auto start = pos;
        while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) ++pos;
        if (start == pos) throw fail("expected integer");
        return std::stoul(data.substr(start, pos - start));
    };

    if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5'))
        throw fail("not a P2/P5 PGM file");
    const bool binary = data[1] == '5';
    pos = 2;
    const auto width = header_int();
    const auto height = header_int();
    const auto maxval = header_int();
    if (width == 0 || width != height) throw fail("image must be square and non-empty");
    if (maxval == 0 || maxval > 65535) throw fail("maxval must be in [1, 65535]");

    std::vector<double> px(width * height);
    if (binary) {
        if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
            throw fail("missing whitespace after header");
        ++pos;
        const std::size_t bps = maxval > 255 ? 2 : 1;
        if (data.size() - pos < px.size() * bps) throw fail("truncated pixel data");
        for (std::size_t i = 0; i < px.size(); ++i) {
            const auto hi = static_cast<unsigned char>(data[pos + i * bps]);
            unsigned v = hi;
            if (bps == 2) v = (v << 8) | static_cast<unsigned char>(data[pos + i * bps + 1]);
            if (v > maxval) throw fail("sample exceeds maxval");
            px[i] = static_cast<double>(v) / static_cast<double>(maxval);
        }
    } else {
        for (auto& p : px) {
            const auto v = header_int();
            if (v > maxval) throw fail("sample exceeds maxval");
            p = static_cast<double>(v) / static_cast<double>(maxval);
        }
    }
    return Image(width, std::move(px));
}

void write_image_csv(const fs::path& path, const Image& img) {
    write_csv_matrix(path, DenseMatrix{img.n, img.n, img.pixels});
}

Image read_image_csv(const fs::path& path) {
    auto m = read_csv_matrix(path);
    if (m.rows != m.cols) throw IoError(path.string() + ": image CSV must be square");
    return Image(m.rows, std::move(m.data));
}

fs::path sidecar_path(const fs::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

json geometry_to_json(const Geometry& g) {
    return json{{"n", g.n}, {"angles", g.angles}, {"bins", g.bins}};
}

Geometry geometry_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    Geometry g;
    g.n = r.count("n", 0, true);
    g.angles = r.count("angles", 180);
    g.bins = r.count("bins", 0);
    r.finish();
    return at_path(path, [&] {
        if (g.bins == 0) return Geometry::standard(g.n, g.angles);
        g.validate();
        return g;
    });
}

void write_sinogram(const fs::path& csv_path, const Sinogram& sino) {
    const auto& g = sino.geometry;
    write_csv_matrix(csv_path, DenseMatrix{g.angles, g.bins, sino.values});
    write_report_json(sidecar_path(csv_path), json{{"geometry", geometry_to_json(g)}});
}

Sinogram read_sinogram(const fs::path& csv_path) {
    const auto side = read_json(sidecar_path(csv_path));
    ObjectReader r(side, "");
    const auto g = geometry_from_json(r.required("geometry"), "/geometry");
    r.finish();
    auto m = read_csv_matrix(csv_path);
    if (m.rows != g.angles || m.cols != g.bins)
        throw IoError(csv_path.string() + ": shape " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                      " does not match sidecar geometry");
    return Sinogram(g, std::move(m.data));
}

// ----------------------------------------------------------------------------

ExperimentConfig parse_config(const json& j) {
    ObjectReader top(j, "");
    ExperimentConfig cfg;
    cfg.geometry = geometry_from_json(top.required("geometry"), "/geometry");

    if (const json* c = top.optional("corruption")) {
        ObjectReader r(*c, "/corruption");
        cfg.corruption.gaussian_sigma = r.nonneg("gaussian_sigma", 0.0);
        cfg.corruption.uniform_amplitude = r.nonneg("uniform_amplitude", 0.0);
        cfg.corruption.max_shift = r.count("max_shift", 0);
        cfg.corruption.seed = r.count("seed", 0);
        r.finish();
    }
    if (const json* m = top.optional("method")) {
        ObjectReader r(*m, "/method");
        cfg.method.name = r.string("name", cfg.method.name);
        static const std::set<std::string> names{"art", "sart", "fbp", "dilated"};
        if (!names.count(cfg.method.name))
            throw SchemaError("/method/name", "expected one of art, sart, fbp, dilated");
        cfg.method.iterations = r.count("iterations", cfg.method.iterations);
        cfg.method.relax = r.number("relax", cfg.method.relax);
        if (!(cfg.method.relax > 0.0 && cfg.method.relax < 2.0))
            throw SchemaError("/method/relax", "expected value in (0, 2)");
        const auto filter = r.string("fbp_filter", "ram-lak");
        if (filter == "ram-lak") {
            cfg.method.filter = FbpFilter::RamLak;
        } else if (filter == "hann") {
            cfg.method.filter = FbpFilter::Hann;
        } else {
            throw SchemaError("/method/fbp_filter", "expected 'ram-lak' or 'hann'");
        }
        r.finish();
    }
    if (const json* d = top.optional("dilation")) {
        ObjectReader r(*d, "/dilation");
        cfg.dilation.epsilon_noise = r.nonneg("epsilon_noise", 0.0);
        cfg.dilation.max_shift = r.count("max_shift", 0);
        cfg.dilation.adaptive = r.boolean("adaptive", false);
        cfg.dilated.relax = r.number("relax", cfg.dilated.relax);
        if (!(cfg.dilated.relax > 0.0 && cfg.dilated.relax < 2.0))
            throw SchemaError("/dilation/relax", "expected value in (0, 2)");
        r.finish();
    }
    if (const json* t = top.optional("tolerances")) {
        ObjectReader r(*t, "/tolerances");
        cfg.dilated.residual_tol = r.number("residual_tol", cfg.dilated.residual_tol);
        if (!(cfg.dilated.residual_tol > 0.0)) throw SchemaError("/tolerances/residual_tol", "expected number > 0");
        cfg.dilated.bracket_tol = r.nonneg("bracket_tol", cfg.dilated.bracket_tol);
        cfg.dilated.max_iters = r.count("max_sweeps", cfg.dilated.max_iters);
        if (cfg.dilated.max_iters < 1) throw SchemaError("/tolerances/max_sweeps", "expected integer >= 1");
        r.finish();
    }
    if (const json* o = top.optional("outputs")) {
        ObjectReader r(*o, "/outputs");
        cfg.output_dir = r.string("dir", cfg.output_dir);
        r.finish();
    }
    top.finish();
    return cfg;
}

ExperimentConfig read_config(const fs::path& path) {
    const auto j = read_json(path);
    try {
        return parse_config(j);
    } catch (const SchemaError& e) {
        throw SchemaError(e.path(), path.string() + ": " + std::string(e.what()).substr(e.path().size() + 2));
    }
}

json config_to_json(const ExperimentConfig& cfg) {
    return json{
        {"geometry", geometry_to_json(cfg.geometry)},
        {"corruption",
         {{"gaussian_sigma", cfg.corruption.gaussian_sigma},
          {"uniform_amplitude", cfg.corruption.uniform_amplitude},
          {"max_shift", cfg.corruption.max_shift},
          {"seed", cfg.corruption.seed}}},
        {"method",
         {{"name", cfg.method.name},
          {"iterations", cfg.method.iterations},
          {"relax", cfg.method.relax},
          {"fbp_filter", filter_name(cfg.method.filter)}}},
        {"dilation",
         {{"epsilon_noise", cfg.dilation.epsilon_noise},
          {"max_shift", cfg.dilation.max_shift},
          {"adaptive", cfg.dilation.adaptive},
          {"relax", cfg.dilated.relax}}},
        {"tolerances",
         {{"residual_tol", cfg.dilated.residual_tol},
          {"bracket_tol", cfg.dilated.bracket_tol},
          {"max_sweeps", cfg.dilated.max_iters}}},
        {"outputs", {{"dir", cfg.output_dir}}},
    };
}

void write_config(const fs::path& path, const ExperimentConfig& cfg) {
    write_report_json(path, config_to_json(cfg));
}

// ----------------------------------------------------------------------------

SetPtr parse_set(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    const auto type = r.string("type", "", true);
    const double rate = r.nonneg("rate", 1.0);
    SetPtr set;
    if (type == "affine") {
        auto normal = r.numbers("normal");
        const double offset = r.number("offset", 0.0, true);
        set = at_path(path, [&] { return std::make_shared<AffineSet>(Vector(std::move(normal)), offset, rate); });
    } else if (type == "slab") {
        auto normal = r.numbers("normal");
        if (r.has("halfwidth") || r.has("offset")) {
            const double offset = r.number("offset", 0.0, true);
            const double hw = r.nonneg("halfwidth", 0.0, true);
            set = at_path(path, [&] { return std::make_shared<SlabSet>(Vector(std::move(normal)), offset, hw, rate); });
        } else {
            const double lo = r.bound("lo", -kInf);
            const double hi = r.bound("hi", kInf);
            set = at_path(path, [&] {
                return std::make_shared<SlabSet>(SlabSet::between(Vector(std::move(normal)), lo, hi, rate));
            });
        }
    } else if (type == "box") {
        auto lo = r.numbers("lo", -kInf);
        auto hi = r.numbers("hi", kInf);
        set = at_path(path, [&] { return std::make_shared<BoxSet>(std::move(lo), std::move(hi), rate); });
    } else if (type == "ball") {
        auto centre = r.numbers("center");
        const double radius = r.nonneg("radius", 0.0, true);
        set = at_path(path, [&] { return std::make_shared<BallSet>(Vector(std::move(centre)), radius, rate); });
    } else if (type == "point") {
        auto p = r.numbers("point");
        set = at_path(path, [&] { return std::make_shared<PointSet>(Vector(std::move(p)), rate); });
    } else if (type == "bandlimit") {
        const auto length = r.count("length", 0, true);
        const auto bandwidth = r.count("bandwidth", 0, true);
        const double bound = r.nonneg("bound", 0.0);
        set = at_path(path, [&] { return std::make_shared<BandlimitSet>(length, bandwidth, bound, rate); });
    } else {
        throw SchemaError(r.child_path("type"), "unknown set type '" + type + "'");
    }
    r.finish();
    return set;
}

SetList parse_sets(const json& j) {
    const json* list = &j;
    std::string base;
    if (j.is_object()) {
        ObjectReader r(j, "");
        list = &r.required("sets");
        r.finish();
        base = "/sets";
    }
    if (!list->is_array() || list->empty()) throw SchemaError(base.empty() ? "/" : base, "expected non-empty array of sets");
    SetList sets;
    for (std::size_t i = 0; i < list->size(); ++i) sets.push_back(parse_set((*list)[i], base + "/" + std::to_string(i)));
    const auto dim = sets.front()->dim();
    for (std::size_t i = 1; i < sets.size(); ++i)
        if (sets[i]->dim() != dim)
            throw SchemaError(base + "/" + std::to_string(i), "dimension differs from the first set");
    return sets;
}

SetList read_sets(const fs::path& path) {
    const auto j = read_json(path);
    try {
        return parse_sets(j);
    } catch (const SchemaError& e) {
        throw SchemaError(e.path(), path.string() + ": " + std::string(e.what()).substr(e.path().size() + 2));
    }
}

json set_to_json(const ConvexSet& set) {
    json j{{"type", to_string(set.kind())}, {"rate", set.rate()}};
    switch (set.kind()) {
        case SetKind::Affine: {
            const auto& s = static_cast<const AffineSet&>(set);
            j["normal"] = s.normal().values();
            j["offset"] = s.offset();
            break;
        }
        case SetKind::Slab: {
            const auto& s = static_cast<const SlabSet&>(set);
            j["normal"] = s.normal().values();
            j["lo"] = bound_json(s.lo());
            j["hi"] = bound_json(s.hi());
            break;
        }
        case SetKind::Box: {
            const auto& s = static_cast<const BoxSet&>(set);
            j["lo"] = bounds_json(s.lo());
            j["hi"] = bounds_json(s.hi());
            break;
        }
        case SetKind::Ball: {
            const auto& s = static_cast<const BallSet&>(set);
            j["center"] = s.center().values();
            j["radius"] = s.radius();
            break;
        }
        case SetKind::Point:
            j["point"] = static_cast<const PointSet&>(set).point().values();
            break;
        case SetKind::Bandlimit: {
            const auto& s = static_cast<const BandlimitSet&>(set);
            j["length"] = s.length();
            j["bandwidth"] = s.bandwidth();
            j["bound"] = s.bound();
            break;
        }
    }
    return j;
}

// ----------------------------------------------------------------------------

void write_trace_csv(const fs::path& path, const PocsTrace& trace) {
    auto out = open_out(path);
    out << "iter,residual_max,displacement\n";
    for (std::size_t q = 0; q < trace.size(); ++q)
        out << q << ',' << format_double(trace.residual_max[q]) << ',' << format_double(trace.displacement[q])
            << '\n';
    close_checked(out, path);
}

void write_bracket_csv(const fs::path& path, const std::vector<std::pair<double, double>>& history) {
    auto out = open_out(path);
    out << "step,eps_lo,eps_hi\n";
    for (std::size_t k = 0; k < history.size(); ++k)
        out << k << ',' << format_double(history[k].first) << ',' << format_double(history[k].second) << '\n';
    close_checked(out, path);
}

json read_json(const fs::path& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": offset " + std::to_string(e.byte) + ": invalid JSON");
    }
}

void write_report_json(const fs::path& path, const json& report) {
    auto out = open_out(path);
    out << report.dump(2) << '\n';
    close_checked(out, path);
}

}  // namespace dpocs::io
