#include "bloch/wop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "bloch/iterint.hpp"

namespace bloch {

WGrid::WGrid(const PeriodicPotential& pot, double x0, const WGridSpec& spec)
    : pot_(pot),
      spec_(spec),
      x0_(x0),
      cc_(cell_constants(pot_, 1e-13, x0)),
      mesh_(pot_, x0 - pot_.period(), x0, spec.x_order, spec.resolve_tol, spec.min_panels),
      tn_(&gauss(spec.n_w)) {
    if (spec.n_w % 2 == 0 || spec.n_w < 5) throw ConfigError("WGridSpec: n_w must be odd and at least 5");
    W_.resize(nw());
    for (int j = 0; j < nw(); ++j) W_[j] = cc_.V0 + 2.0 * std::atanh(t(j));
    W_[w_center()] = cc_.V0;
    Vx_ = mesh_.V_values();
    fx_ = mesh_.sample([](const Piece& p, double x) { return p.f(x); });
}

std::shared_ptr<const WGrid> make_wgrid(const PeriodicPotential& pot, double x0, const WGridSpec& spec) {
    return std::make_shared<const WGrid>(pot, x0, spec);
}

WGridFunction::WGridFunction(std::shared_ptr<const WGrid> g) : grid(std::move(g)) {
    values.assign(static_cast<std::size_t>(grid->nx()) * grid->nw(), 0.0);
}

std::vector<double> WGridFunction::row(int i) const {
    const int nw = grid->nw();
    return {values.begin() + i * nw, values.begin() + (i + 1) * nw};
}

std::vector<double> WGridFunction::col(int j) const {
    std::vector<double> c(grid->nx());
    for (int i = 0; i < grid->nx(); ++i) c[i] = at(i, j);
    return c;
}

double WGridFunction::eval(double x, double W) const {
    const auto& g = *grid;
    const double L = g.period();
    const double a = g.x0() - L;
    double u = std::fmod(x - a, L);
    if (u < 0.0) u += L;
    if (L - u < 1e-13 * L) u = 0.0;
    double xr = a + u;
    const auto& mesh = g.mesh();
    int p = mesh.panel_of(xr);
    const auto& pn = mesh.panels()[p];
    const int po = mesh.order();
    double s = std::clamp(2.0 * (xr - pn.a) / (pn.b - pn.a) - 1.0, -1.0, 1.0);
    std::vector<double> loc(po), wvals(g.nw());
    for (int j = 0; j < g.nw(); ++j) {
        for (int q = 0; q < po; ++q) loc[q] = at(p * po + q, j);
        wvals[j] = mesh.cheb().interpolate(loc, s);
    }
    double t = std::isinf(W) ? (W > 0 ? 1.0 : -1.0) : WGrid::t_of_W(W, g.cell().V0);
    return g.tnodes().interpolate(wvals, t);
}

WGridFunction& WGridFunction::operator+=(const WGridFunction& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    for (const auto& [p, w] : o.deltas) {
        auto& d = deltas[p];
        if (d.empty()) d.assign(w.size(), 0.0);
        for (std::size_t j = 0; j < w.size(); ++j) d[j] += w[j];
    }
    periodic = periodic && o.periodic;
    return *this;
}

WGridFunction& WGridFunction::operator*=(double s) {
    for (auto& v : values) v *= s;
    for (auto& [p, w] : deltas)
        for (auto& v : w) v *= s;
    return *this;
}

double WGridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

WGridFunction operator+(WGridFunction a, const WGridFunction& b) { return a += b; }
WGridFunction operator-(WGridFunction a, const WGridFunction& b) {
    WGridFunction nb = b;
    nb *= -1.0;
    return a += nb;
}
WGridFunction operator*(double s, WGridFunction a) { return a *= s; }

WGridFunction sample(std::shared_ptr<const WGrid> g, const std::function<double(double, double, double)>& h) {
    WGridFunction r(g);
    for (int i = 0; i < g->nx(); ++i)
        for (int j = 0; j < g->nw(); ++j) r.at(i, j) = h(g->x(i), g->V(i), g->W(j));
    return r;
}

WGridFunction xi_function(std::shared_ptr<const WGrid> g) {
    return sample(std::move(g), [](double, double V, double W) { return std::tanh(0.5 * (W - V)); });
}

namespace {

void require_same_grid(const WGridFunction& h) {
    if (!h.grid) throw ConfigError("WGridFunction has no grid");
}

// d/dW of a row given on the t nodes
std::vector<double> dW(const WGrid& g, const std::vector<double>& r) {
    auto d = g.tnodes().differentiate(r);
    for (int j = 0; j < g.nw(); ++j) d[j] *= 0.5 * (1.0 - g.t(j) * g.t(j));
    return d;
}

}  // namespace

std::vector<double> cell_integral(const WGridFunction& h) {
    require_same_grid(h);
    const auto& g = *h.grid;
    std::vector<double> out(g.nw());
    for (int j = 0; j < g.nw(); ++j) {
        double s = g.mesh().integral(h.col(j));
        for (const auto& [p, w] : h.deltas) s += w[j];
        out[j] = s;
    }
    return out;
}

WGridFunction op_A(const WGridFunction& h) {
    require_same_grid(h);
    if (!h.deltas.empty()) throw ConfigError("op_A: input already carries delta components");
    const auto& g = *h.grid;
    const auto& mesh = g.mesh();
    const int po = mesh.order(), np = mesh.panel_count();
    WGridFunction r(h.grid);
    r.periodic = h.periodic;
    for (int j = 0; j < g.nw(); ++j) {
        auto c = h.col(j);
        auto d = mesh.derivative(c);
        for (int i = 0; i < g.nx(); ++i) r.at(i, j) = d[i];
    }
    for (int p = 0; p < np; ++p) {
        int prev_last = (p == 0 ? np : p) * po - 1;
        std::vector<double> w(g.nw());
        double mx = 0.0;
        for (int j = 0; j < g.nw(); ++j) {
            w[j] = h.at(p * po, j) - h.at(prev_last, j);
            mx = std::max(mx, std::abs(w[j]));
        }
        if (mx > 0.0) r.deltas[p] = std::move(w);
    }
    return r;
}

WGridFunction op_B(const WGridFunction& h) {
    require_same_grid(h);
    if (!h.deltas.empty()) throw ConfigError("op_B: delta components are not supported");
    const auto& g = *h.grid;
    WGridFunction r(h.grid);
    r.periodic = h.periodic;
    const double scale = h.max_abs();
    for (int i = 0; i < g.nx(); ++i) {
        auto row = h.row(i);
        double mx = 0.0;
        for (double v : row) mx = std::max(mx, std::abs(v));
        // judged against the overall scale, so near-zero rows of roundoff pass
        if (mx > 1e-300 && g.tnodes().tail_ratio(row) * mx > g.spec().decay_tol * std::max(mx, scale))
            throw NumericError("op_B: W-grid too coarse (decay test fails at x = " + std::to_string(g.x(i)) + ")");
        auto d = dW(g, row);
        for (int j = 0; j < g.nw(); ++j) {
            double u = g.W(j) - g.V(i);
            r.at(i, j) = std::cosh(u) * row[j] + std::sinh(u) * d[j];
        }
    }
    return r;
}

WGridFunction op_D(const WGridFunction& h) {
    require_same_grid(h);
    const auto& g = *h.grid;
    const int c = g.w_center();
    WGridFunction r = h;
    for (int i = 0; i < g.nx(); ++i) {
        double v = h.at(i, c);
        for (int j = 0; j < g.nw(); ++j) r.at(i, j) -= v;
    }
    for (auto& [p, w] : r.deltas) {
        double v = w[c];
        for (auto& x : w) x -= v;
    }
    return r;
}

WGridFunction op_A_inv(const WGridFunction& gfun) {
    require_same_grid(gfun);
    const auto& g = *gfun.grid;
    if (!gfun.periodic) throw ConfigError("op_A_inv: not in range of A (input is not periodic)");
    const auto& mesh = g.mesh();
    const int po = mesh.order(), nx = g.nx(), nw = g.nw(), c = g.w_center();
    const double L0 = g.cell().L0, V0 = g.cell().V0;

    auto phip = mesh.cumulative(mesh.exp_V(1.0));
    auto phim = mesh.cumulative(mesh.exp_V(-1.0));

    WGridFunction h(gfun.grid);
    h.periodic = true;
    std::vector<double> q(nw), tmp(nx);
    std::vector<std::vector<double>> G(nw);
    // mean test floor: the largest column mass, so outer W columns of roundoff pass
    double gscale = 0.0;
    for (int j = 0; j < nw; ++j) {
        auto col = gfun.col(j);
        for (int i = 0; i < nx; ++i) tmp[i] = std::abs(col[i]);
        double s = mesh.integral(tmp);
        for (const auto& [p, w] : gfun.deltas) s += std::abs(w[j]);
        gscale = std::max(gscale, s);
    }
    for (int j = 0; j < nw; ++j) {
        auto col = gfun.col(j);
        for (int i = 0; i < nx; ++i) tmp[i] = std::abs(col[i]);
        double scale = mesh.integral(tmp);
        double mean = mesh.integral(col);
        for (const auto& [p, w] : gfun.deltas) {
            scale += std::abs(w[j]);
            mean += w[j];
        }
        if (std::abs(mean) > g.spec().mean_tol * std::max(scale, gscale)) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "cell mean %.3g at W = %.6g", mean, g.W(j));
            throw ConfigError(std::string("op_A_inv: not in range of A (") + buf + ")");
        }
        // drop the roundoff residue so the primitive is periodic
        for (auto& v : col) v -= mean / g.period();
        auto cum = mesh.cumulative(col);
        double Tp = 0.0, Tm = 0.0;
        for (const auto& [p, w] : gfun.deltas) {
            for (int i = p * po; i < nx; ++i) cum[i] += w[j];
            Tp += phip[p * po] * w[j];
            Tm += phim[p * po] * w[j];
        }
        for (int i = 0; i < nx; ++i) tmp[i] = phip[i] * col[i];
        Tp += mesh.integral(tmp);
        for (int i = 0; i < nx; ++i) tmp[i] = phim[i] * col[i];
        Tm += mesh.integral(tmp);
        double t = g.t(j);
        q[j] = std::exp(-V0) * (1.0 - t) * (1.0 - t) * Tp - std::exp(V0) * (1.0 + t) * (1.0 + t) * Tm;
        G[j] = std::move(cum);
    }
    // constant fixed by the W = V0 structure of D; removable singularity at t = 0
    std::vector<double> corr(nw);
    for (int j = 0; j < nw; ++j) {
        double t = g.t(j);
        if (j == c)
            corr[j] = g.tnodes().interpolate_derivative(q, 0.0) / (4.0 * L0);
        else
            corr[j] = (q[j] - (1.0 - t * t) * q[c]) / (4.0 * L0 * t);
    }
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nw; ++j) h.at(i, j) = G[j][i] - corr[j];
    return h;
}

WGridFunction op_L(const WGridFunction& h) { return 2.0 * op_A_inv(op_B(h)); }

WGridFunction op_I(int sigma, int sigmap, const WGridFunction& gfun) {
    require_same_grid(gfun);
    if (!gfun.deltas.empty()) throw ConfigError("op_I: delta components are not supported");
    const auto& g = *gfun.grid;
    const auto& mesh = g.mesh();
    const int nx = g.nx();
    auto es = mesh.exp_V(sigma);
    auto esp = mesh.exp_V(sigmap);
    auto Phi = mesh.cumulative(esp);
    const double Phi_tot = Phi.back();
    WGridFunction r(gfun.grid);
    std::vector<double> tmp(nx);
    for (int j = 0; j < g.nw(); ++j) {
        auto col = gfun.col(j);
        for (int i = 0; i < nx; ++i) tmp[i] = es[i] * col[i];
        auto F = mesh.cumulative(tmp);
        for (int i = 0; i < nx; ++i) tmp[i] = esp[i] * F[i];
        double E_tot = mesh.integral(tmp);
        double F_tot = F.back();
        for (int i = 0; i < nx; ++i) r.at(i, j) = E_tot - F[i] * Phi_tot + F_tot * Phi[i];
    }
    return r;
}

namespace {

std::vector<double> apply_K_row(const WGrid& g, int sigma, int sigmap, const std::vector<double>& row) {
    const int nw = g.nw(), c = g.w_center();
    const double V0 = g.cell().V0;
    const int ss = sigma + sigmap;
    auto rW = dW(g, row);
    auto rWW = dW(g, rW);
    std::vector<double> u(nw), out(nw);
    for (int j = 0; j < nw; ++j) u[j] = std::exp(ss * g.W(j)) * (row[j] + sigma * rW[j]);
    for (int j = 0; j < nw; ++j) {
        if (j == c) {
            double du = ss * u[c] + std::exp(ss * V0) * (rW[c] + sigma * rWW[c]);
            out[j] = -sigmap * du;
        } else {
            out[j] = sigmap * (u[j] - u[c]) / std::sinh(V0 - g.W(j));
        }
    }
    return out;
}

}  // namespace

WGridFunction op_K(int sigma, int sigmap, const WGridFunction& gfun) {
    require_same_grid(gfun);
    const auto& g = *gfun.grid;
    WGridFunction r(gfun.grid);
    r.periodic = gfun.periodic;
    for (int i = 0; i < g.nx(); ++i) {
        auto out = apply_K_row(g, sigma, sigmap, gfun.row(i));
        for (int j = 0; j < g.nw(); ++j) r.at(i, j) = out[j];
    }
    for (const auto& [p, w] : gfun.deltas) r.deltas[p] = apply_K_row(g, sigma, sigmap, w);
    return r;
}

WGridFunction op_L_IK(const WGridFunction& h) {
    WGridFunction acc(h.grid);
    for (int s : {1, -1})
        for (int sp : {1, -1}) acc += op_I(s, sp, op_K(-s, -sp, h));
    acc *= 1.0 / (2.0 * h.grid->cell().L0);
    return acc;
}

namespace {

// derivative of V as a delta source: (1 - xi^2) f plus xi jumps at potential jumps
WGridFunction dxi_dx(std::shared_ptr<const WGrid> gp) {
    const auto& g = *gp;
    WGridFunction r = sample(gp, [](double, double, double) { return 0.0; });
    for (int i = 0; i < g.nx(); ++i)
        for (int j = 0; j < g.nw(); ++j) {
            double xi = std::tanh(0.5 * (g.W(j) - g.V(i)));
            r.at(i, j) = (1.0 - xi * xi) * g.f(i);
        }
    const auto& panels = g.mesh().panels();
    const int po = g.mesh().order(), np = g.mesh().panel_count();
    for (int p = 0; p < np; ++p) {
        int prev = (p == 0 ? np - 1 : p - 1);
        if (panels[prev].jump_after == 0.0) continue;
        std::vector<double> w(g.nw());
        for (int j = 0; j < g.nw(); ++j)
            w[j] = std::tanh(0.5 * (g.W(j) - g.V(p * po))) - std::tanh(0.5 * (g.W(j) - g.V(prev * po + po - 1)));
        r.deltas[p] = std::move(w);
    }
    return r;
}

}  // namespace

ExpansionSeries rbar_numeric(const PeriodicPotential& pot, int n, double x0, const WGridSpec& spec) {
    return rbar_numeric(pot, n, make_wgrid(pot, x0, spec));
}

ExpansionSeries rbar_numeric(const PeriodicPotential&, int n, std::shared_ptr<const WGrid> grid) {
    if (n < 0 || n > kMaxRbarOrder) throw ConfigError("rbar_numeric: order must be in [0, " + std::to_string(kMaxRbarOrder) + "]");
    ExpansionSeries es;
    es.order = n;
    auto xi = xi_function(grid);
    // r0 + xi = A^{-1} (d xi / dx)
    WGridFunction h = op_A_inv(dxi_dx(grid));
    es.rbar.push_back(h - xi);
    for (int m = 1; m <= n; ++m) {
        h = op_L(h);
        es.rbar.push_back(h);
    }
    return es;
}

double rbar_closed(const PeriodicPotential& pot, double x, double W, int n, double tol) {
    auto cc = cell_constants(pot, tol);
    const double u = 0.5 * (W - cc.V0);
    const double a = x - pot.period();
    switch (n) {
        case 0:
            return -std::tanh(u);
        case 1: {
            double d = bracket(pot, SignWord("+-"), a, x, tol) - bracket(pot, SignWord("-+"), a, x, tol);
            double ch = std::cosh(u);
            return d / (4.0 * cc.L0 * ch * ch);
        }
        case 2: {
            double pmp = bracket(pot, SignWord("+-+"), a, x, tol);
            double mpm = bracket(pot, SignWord("-+-"), a, x, tol);
            double Q = cell_Q(pot, tol);
            double L0 = cc.L0;
            double ch = std::cosh(u);
            return (std::exp(-0.5 * (W + cc.V0)) * pmp - std::exp(0.5 * (W + cc.V0)) * mpm +
                    (std::pow(L0, 4) / 4.0 + Q) / L0 * std::sinh(u)) /
                   (4.0 * L0 * ch * ch * ch);
        }
        default:
            throw ConfigError("rbar_closed: only n = 0, 1, 2 have closed forms");
    }
}

double minus_infinity_limit(const WGridFunction& r, double x, double Vx, double tol) {
    const auto& g = *r.grid;
    const double V0 = g.cell().V0;
    // r vanishes like 1 - t^2 at both ends; interpolate the smooth factor
    // p = r / (1 - t^2), then e^{-W+V} r / 4 = e^{V - V0} p / (1 + e^{W - V0})^2
    std::vector<double> p(g.nw());
    for (int j = 0; j < g.nw(); ++j) p[j] = r.eval(x, g.W(j)) / (1.0 - g.t(j) * g.t(j));
    double v[3];
    int k = 0;
    for (double w : {8.0, 12.0, 16.0}) {
        double t = -std::tanh(0.5 * w);
        double e = 1.0 + std::exp(-w);
        v[k++] = std::exp(Vx - V0) * g.tnodes().interpolate(p, t) / (e * e);
    }
    double d1 = v[1] - v[0], d2 = v[2] - v[1];
    double lim = v[2];
    if (std::abs(d1 - d2) > 1e-300 && std::abs(d2) < std::abs(d1)) lim = v[2] - d2 * d2 / (d2 - d1);
    if (std::abs(lim - v[2]) > tol * std::max(1.0, std::abs(lim)) || !std::isfinite(lim))
        throw NumericError("expansion_coeffs: W -> -inf extrapolation did not converge");
    return lim;
}

ExpansionSeries expansion_coeffs(const PeriodicPotential& pot, double x, int N, const WGridSpec& spec) {
    if (N < 0 || N > kMaxRbarOrder) throw ConfigError("expansion_coeffs: N must be in [0, " + std::to_string(kMaxRbarOrder) + "]");
    const double tol = 1e-12;
    auto cc = cell_constants(pot, tol);
    const double Vx = pot.V(x), L0 = cc.L0, V0 = cc.V0;
    const double a = x - pot.period();
    const double e = std::exp(Vx - V0);
    ExpansionSeries es;
    es.order = N;
    es.x = x;
    es.a.push_back(-0.5 * e);
    if (N >= 1) {
        double d = bracket(pot, SignWord("+-"), a, x, tol) - bracket(pot, SignWord("-+"), a, x, tol);
        es.a.push_back(e * d / (4.0 * L0));
    }
    if (N >= 2) {
        double pmp = bracket(pot, SignWord("+-+"), a, x, tol);
        double Q = cell_Q(pot, tol);
        es.a.push_back(e / (2.0 * L0) * (std::exp(-V0) * pmp - (std::pow(L0, 4) / 4.0 + Q) / (2.0 * L0)));
    }
    if (N >= 3) {
        auto num = rbar_numeric(pot, N, x + pot.period(), spec);
        for (int n = 3; n <= N; ++n) es.a.push_back(minus_infinity_limit(num.rbar[n], x, Vx));
        es.rbar = std::move(num.rbar);
    }
    for (int n = 0; n <= N; ++n) es.s.push_back(n % 2 == 0 ? 2.0 * es.a[n] : 0.0);
    return es;
}

}  // namespace bloch
