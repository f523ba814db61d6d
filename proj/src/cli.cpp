#include "bloch/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bloch/green.hpp"
#include "bloch/halfline.hpp"
#include "bloch/potential.hpp"
#include "bloch/transfer.hpp"
#include "bloch/types.hpp"
#include "bloch/wop.hpp"

namespace bloch::cli {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool needs_potential(const std::string& c) { return c != "selftest"; }

GreenOptions green_options(const RunConfig& cfg) {
    GreenOptions o;
    o.tol = cfg.tol;
    o.evolve.rtol = cfg.rtol;
    o.evolve.atol = cfg.rtol * 1e-3;
    if (cfg.eps) o.branch.eps_scale = *cfg.eps;
    return o;
}

// k_i = kmin + i (kmax - kmin) / n, i = 1..n
std::vector<double> k_grid(const RunConfig& cfg) {
    std::vector<double> k(cfg.k_count);
    for (int i = 0; i < cfg.k_count; ++i)
        k[i] = cfg.k_min + (cfg.k_max - cfg.k_min) * double(i + 1) / double(cfg.k_count);
    return k;
}

// rows in parallel, joined in order; the first failing row (by index) rethrows
std::vector<std::string> parallel_rows(int n, int threads, const std::function<std::string(int)>& row) {
    std::vector<std::string> out(n);
    std::vector<std::exception_ptr> errs(n);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i; (i = next.fetch_add(1)) < n;) {
            try {
                out[i] = row(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    int nt = threads > 0 ? threads : int(std::max(1u, std::thread::hardware_concurrency()));
    nt = std::min(nt, n);
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

std::string header(const RunConfig& cfg, const PeriodicPotential* pot, const std::string& columns) {
    std::ostringstream h;
    h << "# bloch-green v" << kVersion << ", schema=" << kSchema << "\n";
    h << "# cmd=" << cfg.command << "\n";
    if (pot) {
        h << "# potential=" << cfg.potential_path << "\n";
        h << "# potential_desc=" << pot->describe() << "\n";
    }
    h << "# kmin=" << num(cfg.k_min) << " kmax=" << num(cfg.k_max) << " n=" << cfg.k_count << "\n";
    h << "# x=" << num(cfg.x) << " y=" << num(cfg.y) << " order=" << cfg.order << "\n";
    h << "# eps=" << (cfg.eps ? num(*cfg.eps) : num(BranchOptions{}.eps_scale)) << " tol=" << num(cfg.tol)
      << " rtol=" << num(cfg.rtol) << "\n";
    h << columns << "\n";
    return h.str();
}

std::string cmd_bands(const RunConfig& cfg, const PeriodicPotential& pot) {
    auto ks = k_grid(cfg);
    auto go = green_options(cfg);
    auto rows = parallel_rows(cfg.k_count, cfg.threads, [&](int i) {
        auto m = monodromy(pot, ks[i], go.evolve, go.branch);
        return num(ks[i]) + "," + num(m.Y.real()) + "," + band_name(m.band) + "," + num(m.Z.real()) + "," +
               num(m.Z.imag());
    });
    std::string s = header(cfg, &pot, "k,Y,band_flag,Re_Z,Im_Z");
    for (auto& r : rows) s += r + "\n";
    return s;
}

std::string cmd_green(const RunConfig& cfg, const PeriodicPotential& pot) {
    auto ks = k_grid(cfg);
    auto go = green_options(cfg);
    auto rows = parallel_rows(cfg.k_count, cfg.threads, [&](int i) {
        auto m = monodromy(pot, ks[i], go.evolve, go.branch);
        try {
            auto g = green_exact(pot, cfg.x, cfg.y, m, go);
            return num(ks[i]) + "," + num(g.G_S.real()) + "," + num(g.G_S.imag()) + "," + num(g.G_F.real()) + "," +
                   num(g.G_F.imag()) + "," + band_name(m.band);
        } catch (const NumericError&) {
            // exactly at an edge the Bloch solutions merge
            if (m.band != BandClass::Edge) throw;
            return num(ks[i]) + ",nan,nan,nan,nan," + band_name(m.band);
        }
    });
    std::string s = header(cfg, &pot, "k,Re_G_S,Im_G_S,Re_G_F,Im_G_F,band_flag");
    for (auto& r : rows) s += r + "\n";
    return s;
}

std::string cmd_expand(const RunConfig& cfg, const PeriodicPotential& pot) {
    const double L = pot.period(), x0 = pot.offset();
    auto rows = parallel_rows(cfg.k_count, cfg.threads, [&](int i) {
        double x = x0 + L * double(i) / double(cfg.k_count);
        auto e = expansion_coeffs(pot, x, 2);
        auto gs = green_series(pot, x, cfg.y, cfg.tol * 10);
        std::string r = num(x);
        for (int n = 0; n <= 2; ++n) r += "," + num(e.a[n]);
        r += "," + num(e.s[0]) + "," + num(e.s[2]);
        for (double g : {gs.gm1, gs.g0, gs.g1, gs.g2}) r += "," + num(g);
        return r;
    });
    std::string s = header(cfg, &pot, "x,a0,a1,a2,s0,s2,g_m1,g0,g1,g2");
    for (auto& r : rows) s += r + "\n";
    return s;
}

std::string cmd_compare(const RunConfig& cfg, const PeriodicPotential& pot) {
    auto ks = k_grid(cfg);
    auto go = green_options(cfg);
    auto gs = green_series(pot, cfg.x, cfg.y, std::max(cfg.tol, 1e-11));
    auto rows = parallel_rows(cfg.k_count, cfg.threads, [&](int i) {
        auto ge = green_exact(pot, cfg.x, cfg.y, Complex(ks[i]), go).G_S;
        auto ser = gs.eval(ks[i], cfg.order);
        return num(ks[i]) + "," + num(std::abs(ge)) + "," + num(std::abs(ser)) + "," +
               num(std::abs(ser - ge) / std::abs(ge));
    });
    std::string s = header(cfg, &pot, "k,abs_G_exact,abs_G_series,rel_err");
    for (auto& r : rows) s += r + "\n";
    return s;
}

// ---- selftest ----

struct Check {
    std::string name;
    double value, limit;
};

std::vector<Check> selftest_checks(const RunConfig& cfg) {
    auto go = green_options(cfg);
    std::vector<Check> out;
    const auto sq = square_potential(1.0, 1.0, 0.6);
    const auto cs = cosine_potential(0.5, 1.0, 0.3);

    {  // det U and composition
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> u(-2.0, 2.0), kk(0.05, 8.0);
        double det = 0, comp = 0;
        for (int i = 0; i < 12; ++i) {
            const auto& p = (i % 2) ? sq : cs;
            double a = u(rng), b = u(rng), c = u(rng);
            Complex k(kk(rng), i % 3 == 0 ? 0.3 : 0.0);
            auto Uab = evolve(p, a, b, k, go.evolve).matrix();
            auto Ubc = evolve(p, b, c, k, go.evolve).matrix();
            auto Uac = evolve(p, a, c, k, go.evolve).matrix();
            det = std::max(det, std::abs(Uab.det() - 1.0));
            comp = std::max(comp, (Uab * Ubc - Uac).max_abs() / std::max(1.0, Uac.max_abs()));
        }
        out.push_back({"unimodular", det, 1e-12});
        out.push_back({"composition", comp, 1e-10});
    }
    {  // small-k series vs ODE
        double e = 0;
        for (double k : {0.1, 0.3, 0.5}) {
            auto A = evolve(sq, 0.9, 0.2, k, go.evolve).matrix();
            auto B = series_evolution(sq, 0.9, 0.2, k).matrix();
            e = std::max(e, (A - B).max_abs());
        }
        out.push_back({"series_vs_ode", e, 1e-8});
    }
    {  // Y and G_S against the square-well closed forms
        SquareWellParams p;
        auto pot = square_well(p);
        double ey = 0, eg = 0;
        for (double k : {0.4, 1.3, 2.0, 3.7, 5.1}) {
            auto m = monodromy(pot, k, go.evolve, go.branch);
            ey = std::max(ey, std::abs(m.Y - square_well_Y(p, k)));
            auto o = square_well_oracle(p, 0.4, 0.1, k, go.branch);
            eg = std::max(eg, std::abs(green_exact(pot, 0.4, 0.1, m, go).G_S - o) / std::abs(o));
        }
        out.push_back({"Y_closed_form", ey, 1e-10});
        out.push_back({"green_oracle", eg, 1e-8});
    }
    {  // free Green function
        auto fr = free_potential(1.0);
        double e = 0;
        for (double k : {0.2, 1.0, 4.0}) {
            Complex ex = std::exp(I * k * 0.5) / (2.0 * I * k);
            e = std::max(e, std::abs(green_exact(fr, 0.7, 0.2, Complex(k), go).G_S - ex) / std::abs(ex));
        }
        out.push_back({"free_green", e, 1e-10});
    }
    {  // S from m-functions, and Sr(k) = Sl(-k); in-band k only
        double em = 0, es = 0;
        for (double k : {0.5, 1.2, 1.9}) {
            auto h = halfline_state(sq, 0.3, k);
            if (h.has_m) {
                Complex Sm = 1.0 - (h.m_plus + h.m_minus) / (2.0 * I * k);
                em = std::max(em, std::abs(Sm - h.S));
            }
            auto a = s_functions(sq, 0.3, Complex(k));
            auto b = s_functions(sq, 0.3, Complex(-k));
            es = std::max(es, std::abs(a.Sr - b.Sl));
        }
        out.push_back({"m_function_S", em, 1e-10});
        out.push_back({"Sr_Sl_symmetry", es, 1e-10});
    }
    {  // r_n numeric vs closed forms, n <= 2
        double e = 0;
        auto ser = rbar_numeric(cs, 2, 0.0);
        const auto& g = *ser.rbar[0].grid;
        for (int n = 0; n <= 2; ++n)
            for (int ix = 0; ix < g.nx(); ix += 7)
                for (int iw = 0; iw < g.nw(); iw += 6) {
                    double x = g.x(ix), W = g.W(iw);
                    e = std::max(e, std::abs(ser.rbar[n].at(ix, iw) - rbar_closed(cs, x, W, n)));
                }
        out.push_back({"rbar_closed_forms", e, 1e-6});
    }
    return out;
}

std::string cmd_selftest(const RunConfig& cfg, bool& ok) {
    auto checks = selftest_checks(cfg);
    std::string s = header(cfg, nullptr, "check,value,limit,status");
    ok = true;
    for (auto& c : checks) {
        bool pass = std::isfinite(c.value) && c.value <= c.limit;
        ok = ok && pass;
        s += c.name + "," + num(c.value) + "," + num(c.limit) + "," + (pass ? "PASS" : "FAIL") + "\n";
    }
    return s;
}

std::string render_impl(const RunConfig& cfg, bool& ok) {
    cfg.validate();
    ok = true;
    if (cfg.command == "selftest") return cmd_selftest(cfg, ok);
    auto pot = load_potential(cfg.potential_path);
    if (cfg.command == "bands") return cmd_bands(cfg, pot);
    if (cfg.command == "green") return cmd_green(cfg, pot);
    if (cfg.command == "expand") return cmd_expand(cfg, pot);
    return cmd_compare(cfg, pot);
}

}  // namespace

void RunConfig::validate() const {
    static const char* cmds[] = {"bands", "green", "expand", "compare", "selftest"};
    if (std::find(std::begin(cmds), std::end(cmds), command) == std::end(cmds))
        throw ConfigError("unknown command '" + command + "'");
    if (!(k_min < k_max)) throw ConfigError("kmin must be below kmax");
    if (k_count < 2) throw ConfigError("n must be at least 2");
    if (order < 0 || order > 2) throw ConfigError("order must be 0, 1 or 2");
    if (!std::isfinite(x) || !std::isfinite(y)) throw ConfigError("x and y must be finite");
    if (!(tol > 0) || !(rtol > 0)) throw ConfigError("tolerances must be positive");
    if (eps && !(*eps > 0)) throw ConfigError("eps must be positive");
    if ((command == "green" || command == "compare") && k_min < 0)
        throw ConfigError("green and compare need kmin >= 0");
    if (needs_potential(command) && potential_path.empty()) throw ConfigError("--potential is required");
}

std::string render(const RunConfig& cfg) {
    bool ok;
    return render_impl(cfg, ok);
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::string text;
    bool ok = true;
    try {
        text = render_impl(cfg, ok);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericError& e) {
        err << "numeric error (" << cfg.command << "): " << e.what() << "\n";
        return kNumericError;
    }
    if (cfg.out.empty()) {
        out << text;
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) {
            err << "cannot open " << cfg.out << " for writing\n";
            return kConfigError;
        }
        f << text;
        if (!f) {
            err << "write to " << cfg.out << " failed\n";
            return kConfigError;
        }
    }
    if (!ok) {
        err << "selftest failed\n";
        return kSelftestFailed;
    }
    return kOk;
}

int main_entry(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Green functions and low-energy expansions for periodic 1D potentials"};
    app.set_version_flag("--version", std::string(kVersion));
    app.add_option("--potential", cfg.potential_path, "potential description file");
    app.add_option("--cmd", cfg.command, "bands | green | expand | compare | selftest")
        ->check(CLI::IsMember({"bands", "green", "expand", "compare", "selftest"}));
    app.add_option("--kmin", cfg.k_min, "grid excludes kmin")->capture_default_str();
    app.add_option("--kmax", cfg.k_max)->capture_default_str();
    app.add_option("--n", cfg.k_count, "grid points (x points for expand)")->capture_default_str();
    app.add_option("--x", cfg.x)->capture_default_str();
    app.add_option("--y", cfg.y)->capture_default_str();
    app.add_option("--order", cfg.order, "series order for compare")->capture_default_str();
    app.add_option("--eps", cfg.eps, "branch rule step, scaled by max(1, k)");
    app.add_option("--tol", cfg.tol, "quadrature tolerance")->capture_default_str();
    app.add_option("--rtol", cfg.rtol, "ODE tolerance")->capture_default_str();
    app.add_option("--threads", cfg.threads, "0 uses all cores")->capture_default_str();
    app.add_option("--out", cfg.out, "output CSV (default stdout)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }
    return run(cfg, std::cout, std::cerr);
}

}  // namespace bloch::cli
