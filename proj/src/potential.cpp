#include "bloch/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "bloch/quadrature.hpp"

namespace bloch {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Hasher {
    std::uint64_t h = 1469598103934665603ull;
    void bytes(const void* p, std::size_t n) {
        auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 1099511628211ull;
        }
    }
    void num(double v) { bytes(&v, sizeof v); }
};

double hermite(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& m, double s,
               bool derivative) {
    s = std::clamp(s, x.front(), x.back());
    auto it = std::upper_bound(x.begin(), x.end(), s);
    std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - x.begin(), 1) - 1, x.size() - 2);
    double h = x[i + 1] - x[i];
    double t = (s - x[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    if (derivative) {
        double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1, d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
        return d00 * y[i] + d10 * m[i] + d01 * y[i + 1] + d11 * m[i + 1];
    }
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y[i] + h * h10 * m[i] + h01 * y[i + 1] + h * h11 * m[i + 1];
}

}  // namespace

std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n - 1), m(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    if (n == 2) return {d[0], d[0]};
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) continue;
        double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
        double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
        m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
    // one-sided three-point ends, limited to keep monotonicity
    auto end = [](double h0, double h1, double d0, double d1) {
        double v = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (v * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(v) > 3 * std::abs(d0)) return 3 * d0;
        return v;
    };
    m[0] = end(x[1] - x[0], x[2] - x[1], d[0], d[1]);
    m[n - 1] = end(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], d[n - 2], d[n - 3]);
    return m;
}

double Segment::value(double s) const {
    switch (kind) {
        case SegmentKind::Const:
            return V;
        case SegmentKind::Linear:
            return V0 + (V1 - V0) * s / len;
        case SegmentKind::Cosine:
            return amp * std::cos(kTwoPi * s / len + phase);
        case SegmentKind::Table:
            return hermite(table_s, table_v, table_m, s, false);
    }
    return 0.0;
}

double Segment::slope(double s) const {
    switch (kind) {
        case SegmentKind::Const:
            return 0.0;
        case SegmentKind::Linear:
            return (V1 - V0) / len;
        case SegmentKind::Cosine:
            return -amp * kTwoPi / len * std::sin(kTwoPi * s / len + phase);
        case SegmentKind::Table:
            return hermite(table_s, table_v, table_m, s, true);
    }
    return 0.0;
}

PeriodicPotential::PeriodicPotential(double period, std::vector<Segment> segments, double offset)
    : L_(period), offset_(offset), segs_(std::move(segments)) {
    if (!(L_ > 0.0) || !std::isfinite(L_)) throw ConfigError("period must be positive");
    if (segs_.empty()) throw ConfigError("potential has no segments");
    double total = 0.0;
    for (const auto& s : segs_) {
        if (!(s.len > 0.0)) throw ConfigError("segment length must be positive");
        total += s.len;
    }
    if (std::abs(total - L_) > 1e-9 * L_)
        throw ConfigError("segment lengths sum to " + std::to_string(total) + ", period is " + std::to_string(L_));

    double pos = 0.0;
    for (auto& s : segs_) {
        s.start = pos;
        pos += s.len;
        if (s.kind == SegmentKind::Table) {
            if (s.table_s.size() < 2) throw ConfigError("table segment needs at least two rows");
            s.table_m = monotone_slopes(s.table_s, s.table_v);
        }
    }
    // the last segment closes the cell exactly
    segs_.back().len = L_ - segs_.back().start;

    for (int i = 0; i < static_cast<int>(segs_.size()); ++i) {
        const auto& s = segs_[i];
        const auto& prev = segs_[(i + segs_.size() - 1) % segs_.size()];
        double dv = s.value(0.0) - prev.value(prev.len);
        double scale = 1.0 + std::max(std::abs(s.value(0.0)), std::abs(prev.value(prev.len)));
        if (std::abs(dv) <= 1e-13 * scale) dv = 0.0;
        bp_.push_back(s.start);
        bp_seg_.push_back(i);
        bp_jump_.push_back(dv);
        if (s.kind == SegmentKind::Table) {
            for (std::size_t j = 1; j + 1 < s.table_s.size(); ++j) {
                bp_.push_back(s.start + s.table_s[j]);
                bp_seg_.push_back(i);
                bp_jump_.push_back(0.0);
            }
        }
    }

    Hasher h;
    h.num(L_);
    h.num(offset_);
    for (const auto& s : segs_) {
        int k = static_cast<int>(s.kind);
        h.bytes(&k, sizeof k);
        for (double v : {s.len, s.V, s.V0, s.V1, s.amp, s.phase}) h.num(v);
        for (double v : s.table_s) h.num(v);
        for (double v : s.table_v) h.num(v);
    }
    hash_ = h.h;
}

bool PeriodicPotential::has_jumps() const {
    return std::any_of(bp_jump_.begin(), bp_jump_.end(), [](double d) { return d != 0.0; });
}

std::string PeriodicPotential::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "period=" << L_;
    if (offset_ != 0.0) os << " offset=" << offset_;
    for (const auto& s : segs_) {
        switch (s.kind) {
            case SegmentKind::Const:
                os << "; const V=" << s.V;
                break;
            case SegmentKind::Linear:
                os << "; linear V0=" << s.V0 << " V1=" << s.V1;
                break;
            case SegmentKind::Cosine:
                os << "; cosine amp=" << s.amp << " phase=" << s.phase;
                break;
            case SegmentKind::Table:
                os << "; table rows=" << s.table_s.size();
                break;
        }
        os << " len=" << s.len;
    }
    return os.str();
}

PeriodicPotential::Located PeriodicPotential::locate(double x) const {
    double r = (x - offset_) / L_;
    auto n = static_cast<long long>(std::floor(r));
    double u = (x - offset_) - double(n) * L_;
    if (u < 0.0) {
        u += L_;
        --n;
    }
    if (u >= L_) {
        u -= L_;
        ++n;
    }
    const double snap = 1e-12 * std::max(L_, std::abs(x - offset_) * 1e-3);
    if (L_ - u <= snap) {
        u = 0.0;
        ++n;
    }
    auto it = std::upper_bound(bp_.begin(), bp_.end(), u);
    int idx = static_cast<int>(it - bp_.begin()) - 1;
    bool on = false;
    if (u - bp_[idx] <= snap) {
        u = bp_[idx];
        on = true;
    } else if (idx + 1 < static_cast<int>(bp_.size()) && bp_[idx + 1] - u <= snap) {
        ++idx;
        u = bp_[idx];
        on = true;
    }
    return {n, idx, u, on};
}

PotentialSample PeriodicPotential::eval(double x) const {
    auto loc = locate(x);
    const auto& seg = segs_[bp_seg_[loc.idx]];
    double s = loc.u - seg.start;
    PotentialSample r;
    r.V = seg.value(s);
    r.f = -0.5 * seg.slope(s);
    if (loc.on_bp && bp_jump_[loc.idx] != 0.0) {
        r.has_jump = true;
        r.dV = bp_jump_[loc.idx];
    }
    return r;
}

Path PeriodicPotential::path(double a, double b) const {
    Path p;
    if (!(b > a)) return p;
    auto la = locate(a);
    auto lb = locate(b);
    if (la.n == lb.n && la.idx == lb.idx && lb.on_bp) return p;
    long long n = la.n;
    int idx = la.idx;
    const int m = static_cast<int>(bp_.size());
    double cur = a;
    // breakpoint at which the walk ends (b itself is on a breakpoint or inside an interval)
    for (;;) {
        int nidx = idx + 1;
        long long nn = n;
        if (nidx == m) {
            nidx = 0;
            ++nn;
        }
        Piece pc;
        pc.seg = &segs_[bp_seg_[idx]];
        pc.origin = offset_ + double(n) * L_ + pc.seg->start;
        pc.a = cur;
        bool last = (n == lb.n && idx == lb.idx && !lb.on_bp) || (nn == lb.n && nidx == lb.idx && lb.on_bp);
        if (last) {
            pc.b = b;
            p.pieces.push_back(pc);
            p.jump_after.push_back(lb.on_bp ? bp_jump_[lb.idx] : 0.0);
            break;
        }
        pc.b = bp_x(nn, nidx);
        p.pieces.push_back(pc);
        p.jump_after.push_back(bp_jump_[nidx]);
        cur = pc.b;
        n = nn;
        idx = nidx;
    }
    return p;
}

namespace {

std::map<std::string, std::string> parse_kv(const std::vector<std::string>& toks, std::size_t from, int line) {
    std::map<std::string, std::string> kv;
    for (std::size_t i = from; i < toks.size(); ++i) {
        auto eq = toks[i].find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("line " + std::to_string(line) + ": expected key=value, got '" + toks[i] + "'");
        kv[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
    }
    return kv;
}

double to_num(const std::string& s, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": bad number for " + key + ": '" + s + "'");
    }
}

double need(std::map<std::string, std::string>& kv, const std::string& key, int line) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("line " + std::to_string(line) + ": missing " + key);
    double v = to_num(it->second, line, key);
    kv.erase(it);
    return v;
}

void read_table(Segment& seg, const std::filesystem::path& file, int line) {
    std::ifstream in(file);
    if (!in) throw ConfigError("line " + std::to_string(line) + ": cannot open table " + file.string());
    std::string row;
    int rn = 0;
    while (std::getline(in, row)) {
        ++rn;
        auto h = row.find('#');
        if (h != std::string::npos) row.resize(h);
        row = trim(row);
        if (row.empty()) continue;
        auto c = row.find(',');
        if (c == std::string::npos) throw ConfigError(file.string() + ":" + std::to_string(rn) + ": expected 's,V'");
        double s = 0.0, v = 0.0;
        try {
            s = std::stod(row.substr(0, c));
            v = std::stod(row.substr(c + 1));
        } catch (const std::exception&) {
            if (seg.table_s.empty()) continue;  // header row
            throw ConfigError(file.string() + ":" + std::to_string(rn) + ": bad number");
        }
        if (!seg.table_s.empty() && !(s > seg.table_s.back()))
            throw ConfigError(file.string() + ":" + std::to_string(rn) + ": positions must increase");
        seg.table_s.push_back(s);
        seg.table_v.push_back(v);
    }
    if (seg.table_s.size() < 2) throw ConfigError("line " + std::to_string(line) + ": table needs two rows");
    if (std::abs(seg.table_s.front()) > 1e-12 || std::abs(seg.table_s.back() - seg.len) > 1e-9 * seg.len)
        throw ConfigError("line " + std::to_string(line) + ": table positions must span [0, len]");
    seg.table_s.front() = 0.0;
    seg.table_s.back() = seg.len;
}

}  // namespace

PeriodicPotential parse_potential(const std::string& text, const std::filesystem::path& base_dir) {
    std::optional<double> period;
    double offset = 0.0;
    std::vector<Segment> segs;

    std::istringstream lines(text);
    std::string raw;
    int line = 0;
    while (std::getline(lines, raw)) {
        ++line;
        auto h = raw.find('#');
        if (h != std::string::npos) raw.resize(h);
        std::stringstream stmts(raw);
        std::string stmt;
        while (std::getline(stmts, stmt, ';')) {
            std::istringstream ts(stmt);
            std::vector<std::string> toks;
            for (std::string t; ts >> t;) toks.push_back(t);
            if (toks.empty()) continue;

            if (!period) {
                auto kv = parse_kv(toks, 0, line);
                if (!kv.count("period")) throw ConfigError("line " + std::to_string(line) + ": expected period=<float> first");
                period = need(kv, "period", line);
                if (kv.count("offset")) offset = need(kv, "offset", line);
                if (!kv.empty()) throw ConfigError("line " + std::to_string(line) + ": unknown key " + kv.begin()->first);
                if (!(*period > 0.0)) throw ConfigError("line " + std::to_string(line) + ": period must be positive");
                continue;
            }

            std::size_t k = 0;
            if (toks[0] == "segment") k = 1;
            if (k >= toks.size()) throw ConfigError("line " + std::to_string(line) + ": segment kind missing");
            const std::string kind = toks[k];
            auto kv = parse_kv(toks, k + 1, line);
            Segment seg;
            if (kind == "const") {
                seg.kind = SegmentKind::Const;
                seg.V = need(kv, "V", line);
            } else if (kind == "linear") {
                seg.kind = SegmentKind::Linear;
                seg.V0 = need(kv, "V0", line);
                seg.V1 = need(kv, "V1", line);
            } else if (kind == "cosine") {
                seg.kind = SegmentKind::Cosine;
                seg.amp = need(kv, "amp", line);
                seg.phase = kv.count("phase") ? need(kv, "phase", line) : 0.0;
            } else if (kind == "table") {
                seg.kind = SegmentKind::Table;
            } else {
                throw ConfigError("line " + std::to_string(line) + ": unknown segment kind '" + kind + "'");
            }
            seg.len = need(kv, "len", line);
            if (!(seg.len > 0.0)) throw ConfigError("line " + std::to_string(line) + ": len must be positive");
            if (seg.kind == SegmentKind::Table) {
                auto it = kv.find("file");
                if (it == kv.end()) throw ConfigError("line " + std::to_string(line) + ": missing file");
                std::filesystem::path f = it->second;
                kv.erase(it);
                if (f.is_relative()) f = base_dir / f;
                read_table(seg, f, line);
            }
            if (!kv.empty()) throw ConfigError("line " + std::to_string(line) + ": unknown key " + kv.begin()->first);
            segs.push_back(std::move(seg));
        }
    }
    if (!period) throw ConfigError("line " + std::to_string(line) + ": missing period");
    if (segs.empty()) throw ConfigError("line " + std::to_string(line) + ": no segments");
    try {
        return PeriodicPotential(*period, std::move(segs), offset);
    } catch (const ConfigError& e) {
        throw ConfigError("line " + std::to_string(line) + ": " + e.what());
    }
}

PeriodicPotential load_potential(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open potential file " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_potential(ss.str(), file.parent_path());
}

CellConstants cell_constants(const PeriodicPotential& pot, double tol) {
    return cell_constants(pot, tol, pot.offset() + pot.period());
}

CellConstants cell_constants(const PeriodicPotential& pot, double tol, double x_end) {
    if (!(tol > 0.0)) throw ConfigError("cell_constants: tol must be positive");
    const double a = x_end - pot.period();
    CellConstants c;
    c.M = integrate_pieces(pot, [](const Piece& p, double x) { return std::exp(-p.V(x)); }, a, x_end, tol);
    c.P = integrate_pieces(pot, [](const Piece& p, double x) { return std::exp(p.V(x)); }, a, x_end, tol);
    c.L0 = std::sqrt(c.P * c.M);
    c.V0 = 0.5 * std::log(c.P / c.M);
    return c;
}

PeriodicPotential square_potential(double C, double L, double a) {
    if (!(a > 0.0 && a < L)) throw ConfigError("square potential needs 0 < a < L");
    Segment s0, s1;
    s0.V = 0.0;
    s0.len = a;
    s1.V = C;
    s1.len = L - a;
    return PeriodicPotential(L, {s0, s1});
}

PeriodicPotential free_potential(double L) {
    Segment s;
    s.len = L;
    return PeriodicPotential(L, {s});
}

PeriodicPotential cosine_potential(double amp, double L, double phase) {
    Segment s;
    s.kind = SegmentKind::Cosine;
    s.amp = amp;
    s.phase = phase;
    s.len = L;
    return PeriodicPotential(L, {s});
}

}  // namespace bloch
