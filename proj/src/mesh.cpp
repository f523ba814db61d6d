#include "bloch/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace bloch {

namespace {

bool resolved(const ChebNodes& cn, const Piece& pc, double a, double b, double tol) {
    if (pc.seg->flat()) return true;
    std::vector<double> up(cn.size()), dn(cn.size());
    for (int j = 0; j < cn.size(); ++j) {
        double x = a + (b - a) * 0.5 * (cn.nodes()[j] + 1.0);
        double v = pc.V(x);
        up[j] = std::exp(v);
        dn[j] = std::exp(-v);
    }
    return cn.tail_ratio(up) <= tol && cn.tail_ratio(dn) <= tol;
}

}  // namespace

PanelMesh::PanelMesh(const PeriodicPotential& pot, double a, double b, int order, double resolve_tol, int min_panels)
    : a_(a), b_(b), p_(order), cheb_(&lobatto(order)) {
    if (!(b > a)) throw ConfigError("PanelMesh: empty interval");
    auto path = pot.path(a, b);
    for (std::size_t k = 0; k < path.pieces.size(); ++k) {
        const auto& pc = path.pieces[k];
        // split into at least enough pieces to honour min_panels overall
        int pre = std::max(1, static_cast<int>(std::ceil(min_panels * (pc.b - pc.a) / (b - a))));
        std::vector<std::pair<double, double>> todo;
        for (int i = pre - 1; i >= 0; --i)
            todo.emplace_back(pc.a + (pc.b - pc.a) * i / pre, i + 1 == pre ? pc.b : pc.a + (pc.b - pc.a) * (i + 1) / pre);
        std::vector<Panel> out;
        while (!todo.empty()) {
            auto [lo, hi] = todo.back();
            todo.pop_back();
            if (resolved(*cheb_, pc, lo, hi, resolve_tol) || (hi - lo) < 1e-6 * (b - a)) {
                out.push_back({lo, hi, pc, 0.0});
            } else {
                double mid = 0.5 * (lo + hi);
                todo.emplace_back(mid, hi);
                todo.emplace_back(lo, mid);
            }
            if (out.size() > 100000) throw NumericError("PanelMesh: refinement did not terminate");
        }
        out.back().jump_after = path.jump_after[k];
        panels_.insert(panels_.end(), out.begin(), out.end());
    }
    x_.resize(size());
    for (int i = 0; i < panel_count(); ++i) {
        const auto& pn = panels_[i];
        for (int j = 0; j < p_; ++j) x_[i * p_ + j] = pn.a + (pn.b - pn.a) * 0.5 * (cheb_->nodes()[j] + 1.0);
        x_[i * p_] = pn.a;
        x_[i * p_ + p_ - 1] = pn.b;
    }
}

std::vector<double> PanelMesh::exp_V(double sigma) const {
    return sample([sigma](const Piece& pc, double x) { return std::exp(sigma * pc.V(x)); });
}

std::vector<double> PanelMesh::V_values() const {
    return sample([](const Piece& pc, double x) { return pc.V(x); });
}

std::vector<double> PanelMesh::cumulative(const std::vector<double>& f) const {
    std::vector<double> r(size());
    std::vector<double> loc(p_);
    double base = 0.0;
    for (int i = 0; i < panel_count(); ++i) {
        double h = 0.5 * (panels_[i].b - panels_[i].a);
        std::copy(f.begin() + i * p_, f.begin() + (i + 1) * p_, loc.begin());
        auto c = cheb_->cumulative(loc);
        for (int j = 0; j < p_; ++j) r[i * p_ + j] = base + h * c[j];
        base = r[i * p_ + p_ - 1];
    }
    return r;
}

double PanelMesh::integral(const std::vector<double>& f) const {
    double s = 0.0;
    std::vector<double> loc(p_);
    for (int i = 0; i < panel_count(); ++i) {
        std::copy(f.begin() + i * p_, f.begin() + (i + 1) * p_, loc.begin());
        s += 0.5 * (panels_[i].b - panels_[i].a) * cheb_->integrate(loc);
    }
    return s;
}

std::vector<double> PanelMesh::derivative(const std::vector<double>& f) const {
    std::vector<double> r(size());
    std::vector<double> loc(p_);
    for (int i = 0; i < panel_count(); ++i) {
        double h = 0.5 * (panels_[i].b - panels_[i].a);
        std::copy(f.begin() + i * p_, f.begin() + (i + 1) * p_, loc.begin());
        auto d = cheb_->differentiate(loc);
        for (int j = 0; j < p_; ++j) r[i * p_ + j] = d[j] / h;
    }
    return r;
}

int PanelMesh::panel_of(double x, bool left) const {
    int n = panel_count();
    if (left) {
        for (int i = 0; i < n; ++i)
            if (x <= panels_[i].b) return i;
        return n - 1;
    }
    for (int i = n - 1; i >= 0; --i)
        if (x >= panels_[i].a) return i;
    return 0;
}

double PanelMesh::interpolate(const std::vector<double>& f, double x, bool left) const {
    int i = panel_of(x, left);
    const auto& pn = panels_[i];
    double t = std::clamp(2.0 * (x - pn.a) / (pn.b - pn.a) - 1.0, -1.0, 1.0);
    std::vector<double> loc(f.begin() + i * p_, f.begin() + (i + 1) * p_);
    return cheb_->interpolate(loc, t);
}

}  // namespace bloch
