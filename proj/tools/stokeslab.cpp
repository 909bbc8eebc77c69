// Copyright 2026 The stokeslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// stokeslab: CSV front end for the library.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stokeslab/criteria.hpp"
#include "stokeslab/loss.hpp"
#include "stokeslab/parallel.hpp"
#include "stokeslab/sampler.hpp"
#include "stokeslab/states.hpp"
#include "stokeslab/stokes.hpp"

namespace {

using namespace stokeslab;

class UsageError : public Error {
  public:
    explicit UsageError(const std::string &what) : Error("usage", what) {}
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Photon-number cutoff above which `--method auto` switches to the closed forms.
constexpr int kAutoFockLimit = 450;

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
    return std::string(buf, r.ptr);
}

using Cell = std::variant<double, long long, std::string>;

std::string cell_text(const Cell &c) {
    if (const double *d = std::get_if<double>(&c)) return fmt(*d);
    if (const long long *i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

struct Common {
    std::string out;
    int jobs = 0;
    std::uint64_t seed = 1;
    int nmax = -1;
    double tail_tol = 1e-12;

    std::optional<int> n_max() const { return nmax < 0 ? std::nullopt : std::optional<int>(nmax); }
    int workers() const { return jobs > 0 ? jobs : default_jobs(); }
    void validate() const {
        if (jobs < 0) throw UsageError("--jobs must be >= 0");
        if (!(tail_tol > 0.0)) throw UsageError("--tail-tol must be > 0");
    }
};

void add_common(CLI::App *app, Common &c) {
    app->add_option("--out", c.out, "Output path (default: stdout)");
    app->add_option("--jobs", c.jobs, "Worker threads (0: STOKESLAB_JOBS or hardware concurrency)");
    app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    app->add_option("--nmax", c.nmax, "BSV truncation order (default: smallest meeting --tail-tol)");
    app->add_option("--tail-tol", c.tail_tol, "Largest discarded BSV probability mass")->capture_default_str();
}

class Table {
  public:
    explicit Table(const std::string &path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw Error("io", "cannot open output file " + path);
        }
    }

    void config(const std::vector<std::pair<std::string, std::string>> &kv) {
        os() << "# config:";
        for (const auto &[k, v] : kv) os() << ' ' << k << '=' << v;
        os() << '\n';
    }

    void header(const std::vector<std::string> &cols) { line(std::vector<Cell>(cols.begin(), cols.end())); }

    void line(const std::vector<Cell> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os() << (i ? "," : "") << cell_text(cells[i]);
        os() << '\n';
    }

    void finish() {
        os().flush();
        if (!os()) throw Error("io", "write failed");
    }

  private:
    std::ostream &os() { return file_.is_open() ? static_cast<std::ostream &>(file_) : std::cout; }
    std::ofstream file_;
};

// ---------------------------------------------------------------------------
// Argument parsing helpers

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto p = s.find(sep);
        out.push_back(s.substr(0, p));
        if (p == std::string_view::npos) return out;
        s.remove_prefix(p + 1);
    }
}

template <class T>
T parse_number(std::string_view s, const std::string &what) {
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw UsageError("bad number '" + std::string(s) + "' in " + what);
    return v;
}

/// vacuum | singlet:N | bsv:GAMMA | fock:HA,VA,HB,VB | coherent:AH,AV,BH,BV
StateVector parse_state(const std::string &spec, const Common &c) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string_view arg = colon == std::string::npos ? std::string_view{} : std::string_view(spec).substr(colon + 1);
    auto need_args = [&](std::size_t n) {
        const auto parts = split(arg, ',');
        if (colon == std::string::npos || parts.size() != n)
            throw UsageError("state '" + spec + "' expects " + std::to_string(n) + " comma-separated value(s)");
        return parts;
    };
    if (kind == "vacuum" && colon == std::string::npos) return StateVector::vacuum();
    if (kind == "singlet") {
        const int n = parse_number<int>(need_args(1)[0], "singlet order");
        if (n < 0) throw UsageError("singlet order must be >= 0");
        return singlet(n);
    }
    if (kind == "bsv") return bsv(BsvParams{parse_number<double>(need_args(1)[0], "bsv gain"), c.n_max(), c.tail_tol});
    if (kind == "fock") {
        const auto p = need_args(4);
        int k[4];
        for (int i = 0; i < 4; ++i) k[i] = parse_number<int>(p[static_cast<std::size_t>(i)], "fock occupation");
        return product_state(BeamState::fock(k[0], k[1]), BeamState::fock(k[2], k[3]));
    }
    if (kind == "coherent") {
        const auto p = need_args(4);
        double a[4];
        for (int i = 0; i < 4; ++i) a[i] = parse_number<double>(p[static_cast<std::size_t>(i)], "coherent amplitude");
        const int cut = c.n_max().value_or(16);
        return product_state(BeamState::coherent(a[0], a[1], cut), BeamState::coherent(a[2], a[3], cut));
    }
    throw UsageError("unknown state '" + spec + "' (vacuum, singlet:N, bsv:G, fock:HA,VA,HB,VB, coherent:AH,AV,BH,BV)");
}

/// 1|2|3, h|d|r, or a direction x,y,z.
BasisSetting parse_basis(const std::string &s) {
    if (s == "1" || s == "h") return BasisSetting::index(1);
    if (s == "2" || s == "d") return BasisSetting::index(2);
    if (s == "3" || s == "r") return BasisSetting::index(3);
    const auto p = split(s, ',');
    if (p.size() != 3) throw UsageError("basis '" + s + "' must be 1, 2, 3 or a direction x,y,z");
    return BasisSetting::direction(Vec3(parse_number<double>(p[0], "basis"), parse_number<double>(p[1], "basis"),
                                        parse_number<double>(p[2], "basis")));
}

std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (steps - 1);
    out.back() = hi;
    return out;
}

// ---------------------------------------------------------------------------
// SVG line plots

struct Series {
    std::string name;
    std::vector<double> x, y;
};

void write_svg(const std::string &path, const std::string &title, const std::string &xlabel, const std::vector<Series> &series,
               std::optional<double> guide = {}) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto &s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]), x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]), y1 = std::max(y1, s.y[i]);
        }
    }
    if (guide) y0 = std::min(y0, *guide), y1 = std::max(y1, *guide);
    if (!(x0 < x1)) x0 -= 0.5, x1 += 0.5;
    if (!(y0 < y1)) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad, y1 += pad;
    const double w = 640, h = 420, l = 70, r = 20, t = 40, b = 50;
    auto px = [&](double x) { return l + (x - x0) / (x1 - x0) * (w - l - r); };
    auto py = [&](double y) { return h - b - (y - y0) / (y1 - y0) * (h - t - b); };

    std::ofstream f(path);
    if (!f) throw Error("io", "cannot open svg file " + path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    f << "<line x1=\"" << l << "\" y1=\"" << h - b << "\" x2=\"" << w - r << "\" y2=\"" << h - b << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << l << "\" y1=\"" << t << "\" x2=\"" << l << "\" y2=\"" << h - b << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
        f << "<text x=\"" << px(xv) << "\" y=\"" << h - b + 16 << "\" text-anchor=\"middle\">" << fmt(std::round(xv * 1e4) / 1e4) << "</text>\n";
        f << "<text x=\"" << l - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << fmt(std::round(yv * 1e4) / 1e4) << "</text>\n";
    }
    f << "<text x=\"" << (l + w - r) / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    if (guide)
        f << "<line x1=\"" << l << "\" y1=\"" << py(*guide) << "\" x2=\"" << w - r << "\" y2=\"" << py(*guide)
          << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
    const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char *col = colors[k % 4];
        f << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < series[k].x.size(); ++i)
            if (std::isfinite(series[k].y[i])) f << px(series[k].x[i]) << ',' << py(series[k].y[i]) << ' ';
        f << "\"/>\n";
        f << "<text x=\"" << w - r - 150 << "\" y=\"" << t + 16 * (k + 1) << "\" fill=\"" << col << "\">" << series[k].name << "</text>\n";
    }
    f << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Subcommands

struct BsvCriteriaArgs {
    double gamma_min = 0.1, gamma_max = 2.0;
    int steps = 20;
    std::string method = "auto";
    std::string svg;
};

int cmd_bsv_criteria(const Common &c, const BsvCriteriaArgs &a) {
    c.validate();
    if (!(a.gamma_min > 0.0 && a.gamma_min < a.gamma_max)) throw UsageError("need 0 < --gamma-min < --gamma-max");
    if (a.steps < 2) throw UsageError("--steps must be >= 2");
    const std::vector<double> grid = linspace(a.gamma_min, a.gamma_max, a.steps);

    struct Row {
        double en, et, tp, t, th;
        std::string source;
    };
    const auto rows = parallel_map(grid.size(), c.workers(), [&](std::size_t i) {
        const double g = grid[i];
        bool fock = a.method == "fock";
        if (a.method == "auto") fock = c.n_max().value_or(bsv_required_n_max(g, c.tail_tol)) <= kAutoFockLimit;
        if (!fock) {
            const TensorTriple t = closed_form_tensors(g);
            return Row{3 * std::abs(t.t_prime), 3 * std::abs(t.theta), t.t_prime, t.t, t.theta, "closed"};
        }
        try {
            const StateVector s = bsv(BsvParams{g, c.n_max(), c.tail_tol});
            const YuResults y = yu_criteria(s);
            const BasisSetting z = BasisSetting::index(1);
            const JointMoments m = joint_moments(s, z, z);
            return Row{y.normalized.lhs, y.traditional.lhs, m.s_a_s_b / m.s0_a_s0_b, m.s_a_s_b,
                       m.sigma_a_sigma_b / m.n_a_n_b, "fock"};
        } catch (const TruncationError &e) {
            throw TruncationError("gamma=" + fmt(g) + ": " + e.what(), e.required_n_max());
        }
    });

    Table out(c.out);
    out.config({{"subcommand", "bsv-criteria"}, {"gamma_min", fmt(a.gamma_min)}, {"gamma_max", fmt(a.gamma_max)},
                {"steps", std::to_string(a.steps)}, {"method", a.method},
                {"nmax", c.nmax < 0 ? "auto" : std::to_string(c.nmax)}, {"tail_tol", fmt(c.tail_tol)}});
    out.header({"gamma", "E_normalized", "E_traditional", "tprime11", "t11", "theta11", "source"});
    Series sn{"E normalized", grid, {}}, st{"E traditional", grid, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Row &r = rows[i];
        out.line({grid[i], r.en, r.et, r.tp, r.t, r.th, r.source});
        sn.y.push_back(r.en);
        st.y.push_back(r.et);
    }
    out.finish();
    if (!a.svg.empty()) write_svg(a.svg, "Yu criterion on BSV (entangled above 1)", "gain", {sn, st}, 1.0);
    return 0;
}

struct CriticalEtaArgs {
    int n_max_sweep = 100;
    double x_tol = 1e-12;
    std::string svg;
};

int cmd_critical_eta(const Common &c, const CriticalEtaArgs &a) {
    c.validate();
    if (a.n_max_sweep < 1) throw UsageError("--n-max-sweep must be >= 1");
    if (!(a.x_tol > 0.0)) throw UsageError("--x-tol must be > 0");
    struct Row {
        double eta;
        std::string warning;
    };
    const auto rows = parallel_map(static_cast<std::size_t>(a.n_max_sweep), c.workers(), [&](std::size_t i) {
        const int n = static_cast<int>(i) + 1;
        try {
            const CriticalEta e = critical_eta(n, a.x_tol);
            return Row{e.eta, e.multiple_roots ? "several sign changes; smallest root reported" : ""};
        } catch (const BracketingError &e) {
            return Row{kNaN, e.what()};
        }
    });
    Table out(c.out);
    out.config({{"subcommand", "critical-eta"}, {"n_max_sweep", std::to_string(a.n_max_sweep)}, {"x_tol", fmt(a.x_tol)}});
    out.header({"n", "eta_crit", "fit_value", "abs_diff"});
    Series se{"eta_crit", {}, {}}, sf{"fit", {}, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int n = static_cast<int>(i) + 1;
        const double fit = critical_eta_fit(n);
        if (!rows[i].warning.empty()) std::cerr << "warning: n=" << n << ": " << rows[i].warning << '\n';
        out.line({static_cast<long long>(n), rows[i].eta, fit, std::abs(rows[i].eta - fit)});
        se.x.push_back(n), se.y.push_back(rows[i].eta);
        sf.x.push_back(n), sf.y.push_back(fit);
    }
    out.finish();
    if (!a.svg.empty()) write_svg(a.svg, "Critical efficiency of the n-photon-pair singlets", "n", {se, sf});
    return 0;
}

struct TensorArgs {
    std::vector<double> gammas{0.3, 0.6, 1.0};
};

int cmd_tensor(const Common &c, const TensorArgs &a) {
    c.validate();
    for (double g : a.gammas)
        if (!(g > 0.0)) throw UsageError("--gamma values must be > 0");
    const std::size_t count = a.gammas.size() * 3;
    const auto rows = parallel_map(count, c.workers(), [&](std::size_t k) {
        const double g = a.gammas[k / 3];
        const BasisSetting b = BasisSetting::index(static_cast<int>(k % 3) + 1);
        const JointMoments m = joint_moments(bsv(BsvParams{g, c.n_max(), c.tail_tol}), b, b);
        return std::array<double, 3>{m.s_a_s_b / m.s0_a_s0_b, m.s_a_s_b, m.sigma_a_sigma_b / m.n_a_n_b};
    });
    Table out(c.out);
    std::string gl;
    for (double g : a.gammas) gl += (gl.empty() ? "" : ";") + fmt(g);
    out.config({{"subcommand", "tensor"}, {"gamma", gl}, {"nmax", c.nmax < 0 ? "auto" : std::to_string(c.nmax)},
                {"tail_tol", fmt(c.tail_tol)}});
    out.header({"gamma", "i", "tprime_fock", "t_fock", "theta_fock", "tprime_closed", "t_closed", "theta_closed",
                "max_abs_diff"});
    for (std::size_t k = 0; k < count; ++k) {
        const double g = a.gammas[k / 3];
        const TensorTriple t = closed_form_tensors(g);
        const auto &f = rows[k];
        const double d = std::max({std::abs(f[0] - t.t_prime), std::abs(f[1] - t.t), std::abs(f[2] - t.theta)});
        out.line({g, static_cast<long long>(k % 3 + 1), f[0], f[1], f[2], t.t_prime, t.t, t.theta, d});
    }
    out.finish();
    return 0;
}

struct SampleArgs {
    std::string state;
    std::string basis_a = "1", basis_b = "1";
    double eta = 1.0;
    long long shots = 100000;
    std::vector<std::string> observables;
};

int cmd_sample(const Common &c, const SampleArgs &a) {
    c.validate();
    if (a.shots < 2) throw UsageError("--shots must be >= 2");
    const StateVector s = parse_state(a.state, c);
    const SettingsPair st{parse_basis(a.basis_a), parse_basis(a.basis_b)};
    const LossParams loss{a.eta};
    loss.validate();

    std::vector<std::string> names = a.observables;
    if (names.empty()) {
        for (RunStatistic r : kAllRunStatistics) names.emplace_back(to_string(r));
        names.emplace_back("G");
    }
    std::vector<std::optional<RunStatistic>> stats;
    for (const auto &n : names) {
        if (n == "G") {
            stats.emplace_back();
            continue;
        }
        const auto *it = std::find_if(std::begin(kAllRunStatistics), std::end(kAllRunStatistics),
                                      [&](RunStatistic r) { return n == to_string(r); });
        if (it == std::end(kAllRunStatistics)) throw UsageError("unknown observable '" + n + "'");
        stats.emplace_back(*it);
    }

    const JointMoments m = joint_moments(s, st.a, st.b, loss);
    const RunBatch batch = sample_runs(s, st, loss, static_cast<std::size_t>(a.shots), c.seed, c.workers());

    Table out(c.out);
    out.config({{"subcommand", "sample"}, {"state", a.state}, {"basis_a", a.basis_a}, {"basis_b", a.basis_b},
                {"eta", fmt(a.eta)}, {"shots", std::to_string(a.shots)}, {"seed", std::to_string(c.seed)},
                {"nmax", c.nmax < 0 ? "auto" : std::to_string(c.nmax)}, {"tail_tol", fmt(c.tail_tol)}});
    out.header({"observable", "estimate", "std_error", "exact", "z_score"});
    for (std::size_t i = 0; i < names.size(); ++i) {
        EstimatorReport r;
        double exact = kNaN;
        if (stats[i]) {
            r = estimate_correlator(batch, *stats[i]);
            exact = exact_statistic(m, *stats[i]);
        } else {
            try {
                r = estimate_intensity_correlation(batch);
                exact = (m.sigma_a_sigma_b / m.norm) / ((m.n_a / m.norm) * (m.n_b / m.norm));
            } catch (const UndefinedResult &) {
                r.estimate = r.std_error = kNaN;
            }
        }
        const double d = r.estimate - exact;
        const double z = r.std_error > 0 ? d / r.std_error
                         : std::isnan(d)  ? kNaN
                         : std::abs(d) <= 1e-12 ? 0.0
                                                : std::copysign(std::numeric_limits<double>::infinity(), d);
        out.line({names[i], r.estimate, r.std_error, exact, z});
    }
    out.finish();
    return 0;
}

struct WitnessArgs {
    std::string coeffs;
    std::string state;
    double eta = 1.0;
    int restarts = 64;
};

int cmd_witness(const Common &c, const WitnessArgs &a) {
    c.validate();
    if (a.restarts < 1) throw UsageError("--restarts must be >= 1");
    const WitnessSpec w = WitnessSpec::load(a.coeffs);
    if (!w.has_correlation_content())
        std::cerr << "warning: coefficient matrix has no sigma_i x sigma_j (i, j >= 1) entries; "
                     "it cannot detect entanglement\n";
    const StateVector s = parse_state(a.state, c);
    SeparableBoundOptions opt;
    opt.restarts = a.restarts;
    opt.seed = c.seed;
    const WitnessReport r = witness_report(s, w, LossParams{a.eta}, opt);
    Table out(c.out);
    out.config({{"subcommand", "witness"}, {"coeffs", a.coeffs}, {"state", a.state}, {"eta", fmt(a.eta)},
                {"restarts", std::to_string(a.restarts)}, {"seed", std::to_string(c.seed)},
                {"nmax", c.nmax < 0 ? "auto" : std::to_string(c.nmax)}, {"tail_tol", fmt(c.tail_tol)}});
    out.header({"value", "b_min", "b_max", "bounds_low_confidence", "verdict"});
    const bool low = r.lower.low_confidence || r.upper.low_confidence;
    out.line({r.value, r.lower.value, r.upper.value, std::string(low ? "true" : "false"),
              std::string(r.violated ? "violation" : "no violation")});
    out.finish();
    return 0;
}

struct EprArgs {
    std::string state;
    double eta = 1.0;
};

int cmd_epr(const Common &c, const EprArgs &a) {
    c.validate();
    const StateVector s = parse_state(a.state, c);
    const LossParams loss{a.eta};
    loss.validate();
    const EprTerms e = epr_terms(s, loss);
    std::vector<std::optional<CriterionResult>> rows{epr_criterion_old(e), epr_criterion_new(e),
                                                     epr_criterion_old_outer_square(s, loss)};
    const CriterionId yu_ids[] = {CriterionId::yu_mapped, CriterionId::yu_traditional};
    try {
        const YuResults y = yu_criteria(s, OrthogonalTriple::standard(), loss);
        rows.emplace_back(y.normalized);
        rows.emplace_back(y.traditional);
    } catch (const UndefinedResult &u) {
        std::cerr << "warning: " << u.what() << '\n';
        rows.emplace_back();
        rows.emplace_back();
    }
    Table out(c.out);
    out.config({{"subcommand", "epr"}, {"state", a.state}, {"eta", fmt(a.eta)},
                {"nmax", c.nmax < 0 ? "auto" : std::to_string(c.nmax)}, {"tail_tol", fmt(c.tail_tol)}});
    out.header({"criterion", "flavor", "lhs", "rhs", "margin", "violated"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i]) {
            const CriterionResult &r = *rows[i];
            out.line({std::string(to_string(r.id)), std::string(to_string(r.flavor)), r.lhs, r.rhs, r.margin,
                      std::string(r.violated ? "true" : "false")});
        } else {
            const CriterionId id = yu_ids[i - 3];
            const Flavor f = id == CriterionId::yu_mapped ? Flavor::normalized : Flavor::traditional;
            out.line({std::string(to_string(id)), std::string(to_string(f)), kNaN, kNaN, kNaN, std::string("undefined")});
        }
    }
    out.finish();
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Stokes-operator entanglement criteria: CSV tables for optical states"};
    app.require_subcommand(1);

    Common common;
    BsvCriteriaArgs bsv_args;
    CriticalEtaArgs eta_args;
    TensorArgs tensor_args;
    SampleArgs sample_args;
    WitnessArgs witness_args;
    EprArgs epr_args;

    auto *bc = app.add_subcommand("bsv-criteria", "Yu criterion values and tensors on BSV over a gain grid");
    add_common(bc, common);
    bc->add_option("--gamma-min", bsv_args.gamma_min)->capture_default_str();
    bc->add_option("--gamma-max", bsv_args.gamma_max)->capture_default_str();
    bc->add_option("--steps", bsv_args.steps, "Grid points, endpoints included")->capture_default_str();
    bc->add_option("--method", bsv_args.method, "fock, closed, or auto (fock up to n_max 450)")
        ->check(CLI::IsMember({"auto", "fock", "closed"}))
        ->capture_default_str();
    bc->add_option("--svg", bsv_args.svg, "Also write a line plot");

    auto *ce = app.add_subcommand("critical-eta", "Critical efficiency of the singlets under the new EPR criterion");
    add_common(ce, common);
    ce->add_option("--n-max-sweep", eta_args.n_max_sweep, "Largest n")->capture_default_str();
    ce->add_option("--x-tol", eta_args.x_tol, "Bisection tolerance")->capture_default_str();
    ce->add_option("--svg", eta_args.svg, "Also write a line plot");

    auto *te = app.add_subcommand("tensor", "BSV correlation tensors: Fock computation against closed forms");
    add_common(te, common);
    te->add_option("--gamma", tensor_args.gammas, "Gains (repeatable)")->capture_default_str();

    auto *sa = app.add_subcommand("sample", "Monte Carlo estimates against exact values");
    add_common(sa, common);
    sa->add_option("--state", sample_args.state, "State spec")->required();
    sa->add_option("--basis-a", sample_args.basis_a, "1, 2, 3 or x,y,z")->capture_default_str();
    sa->add_option("--basis-b", sample_args.basis_b, "1, 2, 3 or x,y,z")->capture_default_str();
    sa->add_option("--eta", sample_args.eta, "Detector efficiency")->capture_default_str();
    sa->add_option("--shots", sample_args.shots)->capture_default_str();
    sa->add_option("--observable", sample_args.observables, "Statistic name or G (repeatable; default all)");

    auto *wi = app.add_subcommand("witness", "Mapped witness value and separable bounds");
    add_common(wi, common);
    wi->add_option("--coeffs", witness_args.coeffs, "4x4 coefficient file")->required();
    wi->add_option("--state", witness_args.state, "State spec")->required();
    wi->add_option("--eta", witness_args.eta, "Detector efficiency")->capture_default_str();
    wi->add_option("--restarts", witness_args.restarts, "Bound search restarts")->capture_default_str();

    auto *ep = app.add_subcommand("epr", "EPR-type and Yu criteria on a state");
    add_common(ep, common);
    ep->add_option("--state", epr_args.state, "State spec")->required();
    ep->add_option("--eta", epr_args.eta, "Detector efficiency")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "error: usage: " << e.what() << '\n';
        return 2;
    }

    try {
        if (bc->parsed()) return cmd_bsv_criteria(common, bsv_args);
        if (ce->parsed()) return cmd_critical_eta(common, eta_args);
        if (te->parsed()) return cmd_tensor(common, tensor_args);
        if (sa->parsed()) return cmd_sample(common, sample_args);
        if (wi->parsed()) return cmd_witness(common, witness_args);
        if (ep->parsed()) return cmd_epr(common, epr_args);
    } catch (const Error &e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
