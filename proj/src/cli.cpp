#include "mimodf/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mimodf/montecarlo.hpp"
#include "mimodf/parallel.hpp"

namespace mimodf {
namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s)
{
    T v{};
    int base = 10;
    if constexpr (std::is_integral_v<T>) {
        if (s.starts_with("0x") || s.starts_with("0X")) {
            s.remove_prefix(2);
            base = 16;
        }
    }
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && s.front() == '+') ++first;
    std::from_chars_result r;
    if constexpr (std::is_integral_v<T>)
        r = std::from_chars(first, last, v, base);
    else
        r = std::from_chars(first, last, v);
    if (r.ec != std::errc{} || r.ptr != last || first == last) return std::nullopt;
    return v;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string snr_tag(double db)
{
    std::string s = format_double(db);
    std::replace(s.begin(), s.end(), '-', 'm');
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + p.string());
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + what : "config: " + what),
      line_(line)
{
}

std::string ScenarioSpec::id() const
{
    return std::string(to_string(kind)) + "_K" + std::to_string(K) + "_N" + std::to_string(N) + "_" +
           std::string(to_string(constraint)) + "_snr" + snr_tag(snr_db) + "dB";
}

std::vector<ScenarioSpec> ExperimentConfig::scenarios() const
{
    std::vector<ScenarioSpec> out;
    for (auto kind : protocols)
        for (int k : K)
            for (int n : N)
                for (auto c : constraints)
                    for (double db : snr_db) out.push_back({kind, k, n, db, c});
    return out;
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig cfg;
    std::set<std::string> seen;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(lineno, "expected 'key = value'");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "missing key");
        if (!seen.insert(key).second) throw ConfigError(lineno, "duplicate key '" + key + "'");
        if (value.empty()) continue;  // empty optional field keeps the default

        auto fail = [&](const std::string& why) { return ConfigError(lineno, key + ": " + why); };
        auto real = [&](std::string_view s) {
            const auto v = parse_number<double>(s);
            if (!v || !std::isfinite(*v)) throw fail("'" + std::string(s) + "' is not a finite number");
            return *v;
        };
        auto integer = [&](std::string_view s, long long lo) {
            const auto v = parse_number<long long>(s);
            if (!v) throw fail("'" + std::string(s) + "' is not an integer");
            if (*v < lo) throw fail("must be >= " + std::to_string(lo));
            return *v;
        };
        auto probability = [&](std::string_view s) {
            const double v = real(s);
            if (v < 0 || v > 1) throw fail("must lie in [0, 1]");
            return v;
        };

        try {
            if (key == "protocols" || key == "protocol") {
                cfg.protocols.clear();
                for (auto item : split(value, ',')) cfg.protocols.push_back(parse_protocol(item));
            } else if (key == "k") {
                cfg.K.clear();
                for (auto item : split(value, ',')) cfg.K.push_back(static_cast<int>(integer(item, 1)));
            } else if (key == "n") {
                cfg.N.clear();
                for (auto item : split(value, ',')) cfg.N.push_back(static_cast<int>(integer(item, 1)));
            } else if (key == "snr_db") {
                cfg.snr_db.clear();
                for (auto item : split(value, ',')) cfg.snr_db.push_back(real(item));
            } else if (key == "constraint" || key == "constraints") {
                cfg.constraints.clear();
                for (auto item : split(value, ',')) cfg.constraints.push_back(parse_constraint(item));
            } else if (key == "p_f") {
                cfg.sensor.p_f = probability(value);
            } else if (key == "p_d") {
                cfg.sensor.p_d = probability(value);
            } else if (key == "p_0") {
                cfg.sensor.p_0 = probability(value);
                cfg.sensor.p_1 = 1 - cfg.sensor.p_0;
            } else if (key == "engine") {
                const std::string e = lower(value);
                if (e == "mc") cfg.engine = EngineSelection::MonteCarlo;
                else if (e == "analytic") cfg.engine = EngineSelection::Analytic;
                else if (e == "both") cfg.engine = EngineSelection::Both;
                else throw fail("expected mc, analytic or both");
            } else if (key == "trials") {
                cfg.trials = integer(value, 1);
            } else if (key == "nodes") {
                cfg.nodes = static_cast<int>(integer(value, 2));
                if (cfg.nodes % 2 != 0) throw fail("must be even");
            } else if (key == "backend") {
                const std::string b = lower(value);
                if (b == "auto") cfg.backend.reset();
                else if (b == "closed") cfg.backend = MgfBackend::ClosedForm;
                else if (b == "determinant") cfg.backend = MgfBackend::Determinant;
                else throw fail("expected auto, closed or determinant");
            } else if (key == "grid_points") {
                cfg.grid_points = static_cast<int>(integer(value, 2));
            } else if (key == "grid") {
                if (lower(value) == "auto") {
                    cfg.grid_range.reset();
                } else {
                    const auto parts = split(value, ',');
                    if (parts.size() != 2) throw fail("expected 'auto' or 'lo, hi'");
                    const double lo = real(parts[0]), hi = real(parts[1]);
                    if (!(hi > lo)) throw fail("upper end must exceed lower end");
                    cfg.grid_range = std::pair{lo, hi};
                }
            } else if (key == "seed") {
                const auto v = parse_number<std::uint64_t>(value);
                if (!v) throw fail("'" + std::string(value) + "' is not an unsigned 64-bit integer");
                cfg.seed = *v;
            } else if (key == "common_random_numbers") {
                const std::string b = lower(value);
                if (b == "true" || b == "1" || b == "yes") cfg.common_random_numbers = true;
                else if (b == "false" || b == "0" || b == "no") cfg.common_random_numbers = false;
                else throw fail("expected true or false");
            } else if (key == "workers") {
                cfg.workers = static_cast<unsigned>(integer(value, 0));
            } else if (key == "output_dir") {
                cfg.output_dir = std::string(value);
            } else {
                throw ConfigError(lineno, "unknown key '" + key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw fail(e.what());
        }
    }
    if (cfg.protocols.empty()) throw ConfigError(0, "at least one protocol is required ('protocols = ...')");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file)
{
    std::ifstream f(file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read config " + file.string());
    std::stringstream buf;
    buf << f.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str());
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) cfg.output_dir = env;
    return cfg;
}

std::string format_double(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string emit_csv(const ResultTable& table)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : table) {
        out += r.scenario_id + ',' + r.protocol + ',' + std::to_string(r.K) + ',' + std::to_string(r.N) + ',' +
               format_double(r.snr_db) + ',' + r.constraint + ',' + r.engine + ',' + format_double(r.gamma) + ',' +
               format_double(r.q_f) + ',' + format_double(r.q_d) + ',' + format_double(r.q_m) + '\n';
    }
    return out;
}

ResultTable parse_csv(std::string_view text)
{
    ResultTable table;
    int lineno = 0;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (header) {
            if (line != kCsvHeader) throw ConfigError(lineno, "unexpected CSV header");
            header = false;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 11) throw ConfigError(lineno, "expected 11 CSV fields");
        auto num = [&](std::string_view s) {
            const auto v = parse_number<double>(s);
            if (!v) throw ConfigError(lineno, "bad number '" + std::string(s) + "'");
            return *v;
        };
        auto integer = [&](std::string_view s) {
            const auto v = parse_number<int>(s);
            if (!v) throw ConfigError(lineno, "bad integer '" + std::string(s) + "'");
            return *v;
        };
        ResultRow r{std::string(f[0]), std::string(f[1]), integer(f[2]), integer(f[3]), num(f[4]),
                    std::string(f[5]), std::string(f[6]), num(f[7]), num(f[8]), num(f[9]), num(f[10])};
        table.push_back(std::move(r));
    }
    if (header) throw ConfigError(0, "CSV has no header");
    return table;
}

void append_curve(ResultTable& table, const ScenarioSpec& spec, const CrocCurve& curve)
{
    for (std::size_t i = 0; i < curve.size(); ++i) {
        table.push_back({spec.id(), std::string(to_string(spec.kind)), spec.K, spec.N, spec.snr_db,
                         std::string(to_string(spec.constraint)), std::string(to_string(curve.engine)),
                         curve.thresholds[i], curve.q_f[i], curve.q_d[i], curve.q_m(i)});
    }
}

void append_bound(ResultTable& table, const ScenarioSpec& spec, const std::vector<BoundPoint>& bound)
{
    for (const auto& b : bound) {
        table.push_back({spec.id(), std::string(to_string(spec.kind)), spec.K, spec.N, spec.snr_db,
                         std::string(to_string(spec.constraint)), "bound", static_cast<double>(b.g), b.q_f,
                         1.0 - b.q_m, b.q_m});
    }
}

SweepReport run_sweep(const ExperimentConfig& config)
{
    const auto specs = config.scenarios();
    if (specs.empty()) throw ConfigError(0, "no scenarios");
    std::filesystem::create_directories(config.output_dir);

    struct Slot {
        ResultTable rows;
        std::string diagnostics;
        std::vector<std::string> errors;
        std::filesystem::path file;
    };
    std::vector<Slot> slots(specs.size());
    const bool want_mc = config.engine != EngineSelection::Analytic;
    const bool want_an = config.engine != EngineSelection::MonteCarlo;

    parallel_for(specs.size(), config.workers, [&](std::size_t i) {
        const ScenarioSpec& spec = specs[i];
        Slot& slot = slots[i];
        auto record = [&](std::string_view what, const std::exception& e) {
            slot.errors.push_back(spec.id() + " [" + std::string(what) + "]: " + e.what());
        };
        try {
            const ProtocolScenario sc =
                make_scenario(spec.kind, spec.constraint, spec.K, spec.N, db_to_linear(spec.snr_db), config.sensor);
            const SeedSpec seed{config.seed};
            const auto grid = config.grid_range
                                  ? linspace(config.grid_range->first, config.grid_range->second, config.grid_points)
                                  : default_threshold_grid(sc, config.grid_points, seed);
            std::optional<CrocCurve> mc, an;
            if (want_an) {
                try {
                    QuadratureConfig quad;
                    quad.nodes = config.nodes;
                    an = analytic_croc(sc, grid, quad, config.backend);
                    append_curve(slot.rows, spec, *an);
                } catch (const std::exception& e) {
                    record("analytic", e);
                }
            }
            if (want_mc) {
                try {
                    McOptions opts;
                    opts.trials = config.trials;
                    opts.seed = seed;
                    opts.common_random_numbers = config.common_random_numbers;
                    mc = estimate_croc(sc, grid, opts);
                    append_curve(slot.rows, spec, *mc);
                } catch (const std::exception& e) {
                    record("mc", e);
                }
            }
            append_bound(slot.rows, spec, observation_bound(spec.K, config.sensor.p_f, config.sensor.p_d));
            if (mc && an) {
                std::string& d = slot.diagnostics;
                for (std::size_t j = 0; j < grid.size(); ++j) {
                    d += spec.id() + ',' + format_double(grid[j]) + ',' + format_double(mc->q_f[j]) + ',' +
                         format_double(an->q_f[j]) + ',' + format_double(mc->q_f[j] - an->q_f[j]) + ',' +
                         format_double(mc->q_d[j]) + ',' + format_double(an->q_d[j]) + ',' +
                         format_double(mc->q_d[j] - an->q_d[j]) + '\n';
                }
            }
            slot.file = config.output_dir / (spec.id() + ".csv");
            write_file(slot.file, emit_csv(slot.rows));
        } catch (const std::exception& e) {
            record("scenario", e);
        }
    });

    SweepReport report;
    std::string diagnostics;
    for (auto& slot : slots) {
        report.table.insert(report.table.end(), slot.rows.begin(), slot.rows.end());
        report.errors.insert(report.errors.end(), slot.errors.begin(), slot.errors.end());
        diagnostics += slot.diagnostics;
        if (!slot.file.empty()) report.files.push_back(slot.file);
    }
    const auto combined = config.output_dir / "combined.csv";
    write_file(combined, emit_csv(report.table));
    report.files.push_back(combined);
    if (want_mc && want_an) {
        const auto diag = config.output_dir / "diagnostics.csv";
        write_file(diag, "scenario_id,gamma,q_f_mc,q_f_analytic,delta_q_f,q_d_mc,q_d_analytic,delta_q_d\n" +
                             diagnostics);
        report.files.push_back(diag);
    }
    return report;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string fixed(double v, int digits = 2)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    return std::string(buf, r.ptr);
}

std::string escape(std::string_view s)
{
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

std::string_view protocol_color(std::string_view p)
{
    if (p == "MAC") return "#d62728";
    if (p == "PAC") return "#1f3fbf";
    if (p == "CMAC") return "#c020c0";
    if (p == "CPAC") return "#00a5b5";
    return "#555555";
}

}  // namespace

std::string render_plot(const ResultTable& table, const std::string& title)
{
    if (table.empty()) throw std::invalid_argument("render_plot: empty table");

    // series keyed by (scenario, engine) in first-appearance order
    struct Series {
        const ResultRow* head;
        std::vector<std::pair<double, double>> pts;
        int dropped = 0;
    };
    std::vector<std::pair<std::string, Series>> series;
    std::map<std::string, std::size_t> index;
    std::set<std::string> with_analytic;
    std::set<std::string> bound_keys;
    for (const auto& r : table) {
        if (r.engine == "analytic") with_analytic.insert(r.scenario_id);
        // one bound series per (K, sensor) is enough; it is identical across scenarios
        std::string key = r.engine == "bound" ? "bound/K" + std::to_string(r.K) : r.scenario_id + "/" + r.engine;
        auto [it, fresh] = index.try_emplace(key, series.size());
        if (fresh) series.push_back({key, Series{&r, {}, 0}});
        Series& s = series[it->second].second;
        if (r.engine == "bound" && !fresh && s.head->scenario_id != r.scenario_id) continue;
        if (r.q_f > 0 && r.q_m > 0) s.pts.emplace_back(r.q_f, r.q_m);
        else ++s.dropped;
    }

    double lo_x = 1, lo_y = 1;
    for (const auto& [key, s] : series)
        for (auto [x, y] : s.pts) {
            lo_x = std::min(lo_x, x);
            lo_y = std::min(lo_y, y);
        }
    const double dec_x = std::max(-6.0, std::floor(std::log10(lo_x)));
    const double dec_y = std::max(-6.0, std::floor(std::log10(lo_y)));
    const double floor_x = dec_x < 0 ? dec_x : -1, floor_y = dec_y < 0 ? dec_y : -1;

    constexpr double W = 760, H = 560, left = 70, right = 250, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double x) { return left + (std::log10(std::max(x, std::pow(10, floor_x))) - floor_x) / -floor_x * pw; };
    auto py = [&](double y) { return top + ph - (std::log10(std::max(y, std::pow(10, floor_y))) - floor_y) / -floor_y * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(W, 0) << "\" height=\"" << fixed(H, 0)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
    // grid and ticks
    for (int d = static_cast<int>(floor_x); d <= 0; ++d) {
        const double x = px(std::pow(10, d));
        o << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(x) << "\" y2=\""
          << fixed(top + ph) << "\" stroke=\"#dddddd\"/>\n";
        o << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(top + ph + 18) << "\" text-anchor=\"middle\">1e"
          << d << "</text>\n";
    }
    for (int d = static_cast<int>(floor_y); d <= 0; ++d) {
        const double y = py(std::pow(10, d));
        o << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(left + pw) << "\" y2=\""
          << fixed(y) << "\" stroke=\"#dddddd\"/>\n";
        o << "<text x=\"" << fixed(left - 8) << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">1e" << d
          << "</text>\n";
    }
    o << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw) << "\" height=\""
      << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(H - 18)
      << "\" text-anchor=\"middle\">q_f</text>\n";
    o << "<text x=\"18\" y=\"" << fixed(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fixed(top + ph / 2) << ")\">q_m</text>\n";

    // dash pattern distinguishes scenarios of the same protocol
    std::map<std::string, int> per_protocol;
    static const char* dashes[] = {"", "6,3", "2,3", "8,3,2,3", "12,4"};
    double ly = top + 10;
    for (const auto& [key, s] : series) {
        const ResultRow& h = *s.head;
        std::string label;
        std::string color(h.engine == "bound" ? "#000000" : protocol_color(h.protocol));
        std::string mark;
        if (h.engine == "bound") {
            label = "observation bound K=" + std::to_string(h.K);
            for (auto [x, y] : s.pts)
                mark += "<rect x=\"" + fixed(px(x) - 3.5) + "\" y=\"" + fixed(py(y) - 3.5) +
                        "\" width=\"7\" height=\"7\" fill=\"none\" stroke=\"" + color + "\"/>\n";
        } else {
            label = h.protocol + " K=" + std::to_string(h.K) + " N=" + std::to_string(h.N) + " " +
                    format_double(h.snr_db) + "dB " + h.constraint + " (" + h.engine + ")";
            const bool markers = h.engine == "mc" && with_analytic.count(h.scenario_id);
            if (markers) {
                for (auto [x, y] : s.pts)
                    mark += "<circle cx=\"" + fixed(px(x)) + "\" cy=\"" + fixed(py(y)) +
                            "\" r=\"2.5\" fill=\"none\" stroke=\"" + color + "\"/>\n";
            } else if (!s.pts.empty()) {
                auto sorted = s.pts;
                std::sort(sorted.begin(), sorted.end());
                const int slot = per_protocol[h.protocol + "/" + h.engine]++;
                mark += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"";
                if (*dashes[slot % 5]) mark += std::string(" stroke-dasharray=\"") + dashes[slot % 5] + "\"";
                mark += " points=\"";
                for (std::size_t i = 0; i < sorted.size(); ++i)
                    mark += (i ? " " : "") + fixed(px(sorted[i].first)) + "," + fixed(py(sorted[i].second));
                mark += "\"/>\n";
            }
        }
        if (s.dropped > 0) label += " [" + std::to_string(s.dropped) + " off-axis]";
        o << mark;
        o << "<text x=\"" << fixed(left + pw + 12) << "\" y=\"" << fixed(ly) << "\" fill=\"" << color
          << "\" font-size=\"10\">" << escape(label) << "</text>\n";
        ly += 14;
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace mimodf
