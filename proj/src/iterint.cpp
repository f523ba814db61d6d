#include "bloch/iterint.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "bloch/mesh.hpp"

namespace bloch {

SignWord::SignWord(std::vector<int> s) : signs(std::move(s)) {
    if (signs.empty()) throw ConfigError("sign word must be nonempty");
    for (int v : signs)
        if (v != 1 && v != -1) throw ConfigError("sign word entries must be +1 or -1");
}

SignWord::SignWord(const std::string& text) {
    for (char c : text) {
        if (c == '+') signs.push_back(1);
        else if (c == '-') signs.push_back(-1);
        else if (c != ' ' && c != ',') throw ConfigError("bad sign word '" + text + "'");
    }
    if (signs.empty()) throw ConfigError("sign word must be nonempty");
}

std::string SignWord::str() const {
    std::string s;
    for (int v : signs) s += v > 0 ? '+' : '-';
    return s;
}

namespace {

double resolve_tol(double tol) { return std::clamp(tol, 1e-14, 1e-8); }

}  // namespace

double bracket_uncached(const PeriodicPotential& pot, const SignWord& word, double a, double b, double tol) {
    if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) throw ConfigError("bracket: need finite a <= b");
    if (word.size() == 0) throw ConfigError("bracket: empty word");
    if (a == b) return 0.0;
    PanelMesh mesh(pot, a, b, 20, resolve_tol(tol));
    auto ep = mesh.exp_V(1.0);
    auto em = mesh.exp_V(-1.0);
    std::vector<double> J(mesh.size(), 1.0), tmp(mesh.size());
    for (int s : word.signs) {
        const auto& e = s > 0 ? ep : em;
        for (int i = 0; i < mesh.size(); ++i) tmp[i] = e[i] * J[i];
        J = mesh.cumulative(tmp);
    }
    double v = J.back();
    if (!std::isfinite(v)) throw NumericError("bracket: non-finite result");
    return v;
}

double bracket(const PeriodicPotential& pot, const SignWord& word, double a, double b, double tol, int max_length) {
    if (static_cast<int>(word.size()) > max_length)
        throw ConfigError("bracket: word longer than " + std::to_string(max_length));
    auto& cache = bracket_cache();
    const std::string key = word.str();
    double v = 0.0;
    if (cache.find(key, a, b, pot.hash(), v)) return v;
    v = bracket_uncached(pot, word, a, b, tol);
    cache.store(key, a, b, pot.hash(), v);
    return v;
}

std::vector<double> alternating_integrals(const PeriodicPotential& pot, int first, double a, double b, int nmax,
                                          double tol) {
    std::vector<double> out(nmax + 1, 0.0);
    out[0] = 1.0;
    if (nmax == 0 || a == b) return out;
    if (b < a) throw ConfigError("alternating_integrals: need a <= b");
    PanelMesh mesh(pot, a, b, 24, resolve_tol(tol));
    auto ep = mesh.exp_V(1.0);
    auto em = mesh.exp_V(-1.0);
    std::vector<double> J(mesh.size(), 1.0), tmp(mesh.size());
    int s = first;
    for (int m = 1; m <= nmax; ++m) {
        const auto& e = s > 0 ? ep : em;
        for (int i = 0; i < mesh.size(); ++i) tmp[i] = e[i] * J[i];
        J = mesh.cumulative(tmp);
        out[m] = J.back();
        s = -s;
    }
    return out;
}

double cell_Q(const PeriodicPotential& pot, double tol) {
    auto q_at = [&](double start) {
        double b = start + pot.period();
        return bracket(pot, SignWord("-+-+"), start, b, tol) + bracket(pot, SignWord("+-+-"), start, b, tol);
    };
    double q0 = q_at(pot.offset());
    double q1 = q_at(pot.offset() + 0.3716 * pot.period());
    if (std::abs(q0 - q1) > 1e-9 * std::max(1.0, std::abs(q0)))
        throw NumericError("cell_Q: window dependence " + std::to_string(std::abs(q0 - q1)));
    return q0;
}

bool BracketCache::find(const std::string& word, double a, double b, std::uint64_t hash, double& out) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(Key{word, a, b, hash});
    if (it == map_.end()) return false;
    out = it->second;
    return true;
}

void BracketCache::store(const std::string& word, double a, double b, std::uint64_t hash, double value) {
    std::unique_lock lock(mu_);
    if (map_.size() > 200000) map_.clear();
    map_[Key{word, a, b, hash}] = value;
}

void BracketCache::clear() {
    std::unique_lock lock(mu_);
    map_.clear();
}

std::size_t BracketCache::size() const {
    std::shared_lock lock(mu_);
    return map_.size();
}

BracketCache& bracket_cache() {
    static BracketCache cache;
    return cache;
}

}  // namespace bloch
