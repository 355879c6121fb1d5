#include "agc/io.hpp"

#include "agc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace agc {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
    out << text;
    require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string matrix_to_csv(const Matrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            const double v = m(i, j);
            out += format_double(v == 0.0 ? 0.0 : v);  // no "-0"
        }
        out += '\n';
    }
    return out;
}

Matrix matrix_from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t next = std::min(line.find(',', pos), line.size());
            double v = 0.0;
            auto [p, ec] = std::from_chars(line.data() + pos, line.data() + next, v);
            require(ec == std::errc{} && p == line.data() + next, ErrorKind::InvalidArgument,
                    "matrix CSV row " + std::to_string(rows.size() + 1) + ": bad number '" +
                        line.substr(pos, next - pos) + "'");
            row.push_back(v);
            pos = next + 1;
        }
        require(rows.empty() || row.size() == rows.front().size(), ErrorKind::InvalidArgument,
                "matrix CSV has ragged rows");
        rows.push_back(std::move(row));
    }
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

std::string sweep_row_csv(const SweepRow& r) {
    std::string s = r.scheme + ',' + r.family + ',' + std::to_string(r.m) + ',' + format_double(r.epsilon) + ',' +
                    std::string(to_string(r.x_kind)) + ',' + format_double(r.x) + ',' + format_double(r.mean_err) +
                    ',' + format_double(r.std_err) + ',' + format_double(r.min_err) + ',' +
                    format_double(r.max_err) + ',' + format_double(r.upper_bound) + ',' +
                    format_double(r.lower_bound) + ',' + std::to_string(r.seed);
    return s;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = std::string(kSweepHeader) + '\n';
    for (const auto& r : rows) out += sweep_row_csv(r) + '\n';
    return out;
}

std::string train_csv(const std::vector<Trajectory>& runs) {
    std::string out = "scheme,seed,iteration,loss\n";
    for (const auto& t : runs)
        for (std::size_t i = 0; i < t.loss.size(); ++i)
            out += t.scheme + ',' + std::to_string(t.seed) + ',' + std::to_string(i) + ',' +
                   format_double(t.loss[i]) + '\n';
    return out;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits = 2) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(digits);
    ss << v;
    return ss.str();
}

// Tick step of the form {1, 2, 5} * 10^e giving about 5 ticks.
double nice_step(double span) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string render_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series) {
    constexpr double W = 720, H = 480, L = 80, R = 200, T = 50, B = 60;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (auto [x, y] : s.points)
            if (std::isfinite(x) && std::isfinite(y)) {
                x0 = std::min(x0, x), x1 = std::max(x1, x);
                y0 = std::min(y0, y), y1 = std::max(y1, y);
            }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    y0 = std::min(y0, 0.0);
    if (y1 == y0) y1 = y0 + 1;
    const double xs = nice_step(x1 - x0), ys = nice_step(y1 - y0);
    x0 = std::floor(x0 / xs) * xs, x1 = std::ceil(x1 / xs) * xs;
    y0 = std::floor(y0 / ys) * ys, y1 = std::ceil(y1 / ys) * ys;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << W << ' ' << H
      << "\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
      << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << xml_escape(title) << "</text>\n";
    o << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n</g>\n";
    o << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    const int digits_x = xs >= 1 ? 0 : static_cast<int>(std::ceil(-std::log10(xs)));
    const int digits_y = ys >= 1 ? 0 : static_cast<int>(std::ceil(-std::log10(ys)));
    for (double x = x0; x <= x1 + xs * 1e-9; x += xs)
        o << "<line x1=\"" << fixed(px(x)) << "\" y1=\"" << H - B << "\" x2=\"" << fixed(px(x)) << "\" y2=\""
          << H - B + 5 << "\" stroke=\"black\"/><text x=\"" << fixed(px(x)) << "\" y=\"" << H - B + 18
          << "\" text-anchor=\"middle\">" << fixed(x, digits_x) << "</text>\n";
    for (double y = y0; y <= y1 + ys * 1e-9; y += ys)
        o << "<line x1=\"" << L - 5 << "\" y1=\"" << fixed(py(y)) << "\" x2=\"" << L << "\" y2=\"" << fixed(py(y))
          << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << fixed(py(y) + 4)
          << "\" text-anchor=\"end\">" << fixed(y, digits_y) << "</text>\n";
    o << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << xml_escape(x_label) << "</text>\n"
      << "<text x=\"20\" y=\"" << (T + (H - T - B) / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 20 " << (T + (H - T - B) / 2) << ")\">" << xml_escape(y_label) << "</text>\n</g>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        bool first = true;
        for (auto [x, y] : series[i].points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            o << (first ? "" : " ") << fixed(px(x)) << ',' << fixed(py(y));
            first = false;
        }
        o << "\"><title>" << xml_escape(series[i].name) << "</title></polyline>\n";
        const double ly = T + 10 + 20.0 * static_cast<double>(i);
        o << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << W - R + 46 << "\" y=\"" << ly + 4
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(series[i].name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

ConfigReader::ConfigReader(const Json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) fail(ErrorKind::InvalidArgument, where_ + ": expected a JSON object");
}

bool ConfigReader::has(const std::string& key) const { return doc_.contains(key); }

const Json& ConfigReader::raw(const std::string& key) const {
    if (!doc_.contains(key)) fail(ErrorKind::InvalidArgument, where_ + ": missing required key \"" + key + "\"");
    return doc_.at(key);
}

void ConfigReader::bad(const std::string& key, const std::string& what) const {
    fail(ErrorKind::InvalidArgument, where_ + "." + key + ": " + what);
}

double ConfigReader::number(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number()) bad(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad(key, "must be finite");
    seen_.push_back(key);
    resolved_[key] = v;
    return d;
}

double ConfigReader::number(const std::string& key, double fallback) {
    if (has(key)) return number(key);
    seen_.push_back(key);
    resolved_[key] = fallback;
    return fallback;
}

long long ConfigReader::integer(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number_integer()) bad(key, "expected an integer");
    seen_.push_back(key);
    resolved_[key] = v;
    return v.get<long long>();
}

long long ConfigReader::integer(const std::string& key, long long fallback) {
    if (has(key)) return integer(key);
    seen_.push_back(key);
    resolved_[key] = fallback;
    return fallback;
}

std::uint64_t ConfigReader::u64(const std::string& key, std::uint64_t fallback) {
    seen_.push_back(key);
    if (!has(key)) {
        resolved_[key] = fallback;
        return fallback;
    }
    const auto& v = doc_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        bad(key, "expected a nonnegative integer");
    const auto out = v.get<std::uint64_t>();
    resolved_[key] = out;
    return out;
}

bool ConfigReader::boolean(const std::string& key, bool fallback) {
    seen_.push_back(key);
    if (!has(key)) {
        resolved_[key] = fallback;
        return fallback;
    }
    const auto& v = doc_.at(key);
    if (!v.is_boolean()) bad(key, "expected true or false");
    resolved_[key] = v;
    return v.get<bool>();
}

std::string ConfigReader::string(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_string()) bad(key, "expected a string");
    seen_.push_back(key);
    resolved_[key] = v;
    return v.get<std::string>();
}

std::string ConfigReader::string(const std::string& key, const std::string& fallback) {
    if (has(key)) return string(key);
    seen_.push_back(key);
    resolved_[key] = fallback;
    return fallback;
}

std::vector<double> ConfigReader::numbers(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_array()) bad(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) bad(key, "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    seen_.push_back(key);
    resolved_[key] = v;
    return out;
}

std::vector<int> ConfigReader::integers(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_array()) bad(key, "expected an array of integers");
    std::vector<int> out;
    for (const auto& e : v) {
        if (!e.is_number_integer()) bad(key, "expected an array of integers");
        out.push_back(e.get<int>());
    }
    seen_.push_back(key);
    resolved_[key] = v;
    return out;
}

ConfigReader& ConfigReader::child(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_object()) bad(key, "expected an object");
    seen_.push_back(key);
    kids_.emplace_back(key, std::make_shared<ConfigReader>(v, where_ + "." + key));
    return *kids_.back().second;
}

std::vector<ConfigReader*> ConfigReader::children(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_array()) bad(key, "expected an array of objects");
    seen_.push_back(key);
    std::vector<std::shared_ptr<ConfigReader>> list;
    std::vector<ConfigReader*> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        list.push_back(std::make_shared<ConfigReader>(v[i], where_ + "." + key + "[" + std::to_string(i) + "]"));
        out.push_back(list.back().get());
    }
    kid_lists_.emplace_back(key, std::move(list));
    return out;
}

void ConfigReader::put(const std::string& key, Json value) {
    seen_.push_back(key);
    resolved_[key] = std::move(value);
}

void ConfigReader::finish() {
    for (auto it = doc_.begin(); it != doc_.end(); ++it)
        if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
            fail(ErrorKind::InvalidArgument, where_ + ": unknown key \"" + it.key() + "\"");
    for (auto& [k, c] : kids_) c->finish();
    for (auto& [k, list] : kid_lists_)
        for (auto& c : list) c->finish();
}

Json ConfigReader::resolved() const {
    Json out = resolved_;
    for (const auto& [k, c] : kids_) out[k] = c->resolved();
    for (const auto& [k, list] : kid_lists_) {
        Json arr = Json::array();
        for (const auto& c : list) arr.push_back(c->resolved());
        out[k] = arr;
    }
    // Keep the caller's key order where possible.
    Json ordered = Json::object();
    for (auto it = doc_.begin(); it != doc_.end(); ++it)
        if (out.contains(it.key())) ordered[it.key()] = out[it.key()];
    for (auto it = out.begin(); it != out.end(); ++it)
        if (!ordered.contains(it.key())) ordered[it.key()] = it.value();
    return ordered;
}

Json parse_json(const std::string& text, const std::string& where) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::InvalidArgument, where + ": malformed JSON: " + e.what());
    }
}

std::vector<DifferenceSet> load_difference_sets(const std::filesystem::path& path) {
    const Json doc = parse_json(read_text(path), path.string());
    std::vector<DifferenceSet> out;
    auto one = [&](const Json& j) {
        if (!j.is_object() || !j.contains("v") || !j.contains("set") || !j["v"].is_number_integer() ||
            !j["set"].is_array())
            fail(ErrorKind::InvalidArgument, path.string() + ": each entry needs integer \"v\" and array \"set\"");
        DifferenceSet ds{j["v"].get<int>(), {}};
        for (const auto& e : j["set"]) {
            if (!e.is_number_integer()) fail(ErrorKind::InvalidArgument, path.string() + ": set entries must be integers");
            ds.set.push_back(e.get<int>());
        }
        out.push_back(std::move(ds));
    };
    if (doc.is_object() && doc.contains("sets")) {
        if (!doc["sets"].is_array()) fail(ErrorKind::InvalidArgument, path.string() + ": \"sets\" must be an array");
        for (const auto& j : doc["sets"]) one(j);
    } else {
        one(doc);
    }
    return out;
}

Json difference_sets_to_json(const std::vector<DifferenceSet>& sets) {
    Json arr = Json::array();
    for (const auto& ds : sets) {
        Json j = Json::object();
        j["v"] = ds.v;
        j["k"] = ds.set.size();
        j["lambda"] = difference_set_lambda(ds);
        j["set"] = ds.set;
        arr.push_back(j);
    }
    Json doc = Json::object();
    doc["sets"] = arr;
    return doc;
}

AssignmentSpec parse_assignment(ConfigReader& r, const std::filesystem::path& base_dir) {
    const std::string family = r.string("family");
    if (family == "bibd") {
        DifferenceSet ds;
        if (r.has("difference_set")) {
            auto& d = r.child("difference_set");
            ds.v = static_cast<int>(d.integer("v"));
            ds.set = d.integers("set");
        } else if (r.has("difference_set_file")) {
            auto file = std::filesystem::path(r.string("difference_set_file"));
            if (file.is_relative()) file = base_dir / file;
            file = std::filesystem::absolute(file).lexically_normal();
            r.put("difference_set_file", file.string());
            const int v = static_cast<int>(r.integer("v"));
            bool found = false;
            for (auto& cand : load_difference_sets(file))
                if (cand.v == v) {
                    ds = std::move(cand);
                    found = true;
                    break;
                }
            if (!found) fail(ErrorKind::InvalidArgument, file.string() + " has no difference set with v = " + std::to_string(v));
        } else {
            const int v = static_cast<int>(r.integer("builtin"));
            auto b = builtin_difference_set(v);
            if (!b) fail(ErrorKind::InvalidArgument, "no built-in difference set with v = " + std::to_string(v));
            ds = *b;
        }
        return BibdSpec{std::move(ds)};
    }
    if (family == "srg_paley") return PaleySpec{static_cast<int>(r.integer("q"))};
    if (family == "coset") {
        CosetParams p;
        p.k = static_cast<int>(r.integer("k"));
        p.m = static_cast<int>(r.integer("m"));
        p.generating_set = r.integers("generating_set");
        p.delta = static_cast<int>(r.integer("delta", static_cast<long long>(p.generating_set.size())));
        return p;
    }
    if (family == "biregular") {
        BiRegularParams p;
        p.n = static_cast<int>(r.integer("n"));
        p.k = static_cast<int>(r.integer("k"));
        p.delta = static_cast<int>(r.integer("delta"));
        p.gamma = static_cast<int>(r.integer("gamma"));
        p.seed = r.u64("seed", 0);
        return p;
    }
    fail(ErrorKind::InvalidArgument, "unknown assignment family \"" + family +
                                         "\" (expected bibd, srg_paley, coset or biregular)");
}

SchemeSpec parse_scheme(ConfigReader& r) {
    SchemeSpec s;
    const std::string name = r.string("scheme");
    if (name == "random_diagonal") {
        s.scheme = Scheme::RandomDiagonal;
        s.epsilon = r.number("epsilon", 0.0);
        DiagonalLaw{s.epsilon}.validate();
    } else if (name == "baseline") {
        s.scheme = Scheme::Baseline;
    } else if (name == "nullspace_hadamard") {
        s.scheme = Scheme::NullspaceHadamard;
        const std::string v1 = r.string("v1", "all_ones");
        if (v1 == "all_ones") s.v1_policy = V1Policy::AllOnes;
        else if (v1 == "gaussian") s.v1_policy = V1Policy::Gaussian;
        else fail(ErrorKind::InvalidArgument, "v1 must be all_ones or gaussian, got \"" + v1 + "\"");
        s.constrain_pm1 = r.boolean("pm1", false);
    } else {
        fail(ErrorKind::InvalidArgument, "unknown scheme \"" + name +
                                             "\" (expected random_diagonal, baseline or nullspace_hadamard)");
    }
    return s;
}

Json report_to_json(const BoundReport& r) {
    Json j = Json::object();
    j["kind"] = std::string(to_string(r.kind));
    j["value"] = r.value;
    Json in = Json::object();
    for (const auto& [k, v] : r.inputs) in[k] = v;
    j["inputs"] = in;
    return j;
}

}  // namespace agc
