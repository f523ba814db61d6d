#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "bloch/types.hpp"

namespace bloch {

// Fritsch-Carlson slopes for a monotone piecewise cubic Hermite interpolant.
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y);

enum class SegmentKind { Const, Linear, Cosine, Table };

struct Segment {
    SegmentKind kind = SegmentKind::Const;
    double len = 0.0;
    double start = 0.0;  // position of the segment inside the cell
    double V = 0.0;      // const
    double V0 = 0.0, V1 = 0.0;  // linear
    double amp = 0.0, phase = 0.0;  // cosine: amp*cos(2*pi*s/len + phase)
    std::vector<double> table_s, table_v;  // table, s in [0, len]

    double value(double s) const;
    double slope(double s) const;  // dV/ds
    bool flat() const { return kind == SegmentKind::Const; }
    bool linear() const { return kind == SegmentKind::Const || kind == SegmentKind::Linear; }

    // node slopes of the monotone cubic, filled by PeriodicPotential
    std::vector<double> table_m;
};

struct PotentialSample {
    double V = 0.0;
    double f = 0.0;
    bool has_jump = false;
    double dV = 0.0;  // V(x+) - V(x-) when has_jump
};

// A stretch [a, b] on which V is smooth; V and f are evaluated by the
// segment's own formula, so endpoint values are one-sided limits.
struct Piece {
    double a = 0.0, b = 0.0;
    const Segment* seg = nullptr;
    double origin = 0.0;  // x where the segment's local coordinate is 0

    double V(double x) const { return seg->value(x - origin); }
    double f(double x) const { return -0.5 * seg->slope(x - origin); }
};

// The ordered smooth pieces of (a, b] and the jumps between them.
// jump_after[i] is the jump applied at pieces[i].b (0 if none); a jump
// sitting exactly at a is excluded, one at b is included.
struct Path {
    std::vector<Piece> pieces;
    std::vector<double> jump_after;
};

class PeriodicPotential {
public:
    PeriodicPotential(double period, std::vector<Segment> segments, double offset = 0.0);

    double period() const { return L_; }
    double offset() const { return offset_; }
    const std::vector<Segment>& segments() const { return segs_; }
    std::uint64_t hash() const { return hash_; }
    bool has_jumps() const;
    std::string describe() const;

    PotentialSample eval(double x) const;
    double V(double x) const { return eval(x).V; }
    double f(double x) const { return eval(x).f; }

    Path path(double a, double b) const;

private:
    struct Located {
        long long n;  // period index
        int idx;      // breakpoint interval
        double u;     // position in the cell
        bool on_bp;   // u equals bp_[idx] after snapping
    };
    Located locate(double x) const;
    double bp_x(long long n, int idx) const { return offset_ + double(n) * L_ + bp_[idx]; }

    double L_, offset_;
    std::vector<Segment> segs_;
    std::vector<double> bp_;      // breakpoints in [0, L), ascending, bp_[0] = 0
    std::vector<int> bp_seg_;     // segment owning [bp_[i], bp_[i+1])
    std::vector<double> bp_jump_; // V jump at bp_[i]
    std::uint64_t hash_ = 0;
};

// Parses the potential description. Statements are separated by newlines
// or ';'. Relative table paths resolve against base_dir.
PeriodicPotential parse_potential(const std::string& text, const std::filesystem::path& base_dir = {});
PeriodicPotential load_potential(const std::filesystem::path& file);

struct CellConstants {
    double M = 0.0, P = 0.0, L0 = 0.0, V0 = 0.0;
};

// Cell integrals over [x_end - L, x_end]; by default the cell starts at the offset.
CellConstants cell_constants(const PeriodicPotential& pot, double tol = 1e-12);
CellConstants cell_constants(const PeriodicPotential& pot, double tol, double x_end);

// Convenience constructors.
PeriodicPotential square_potential(double C, double L, double a);
PeriodicPotential free_potential(double L);
PeriodicPotential cosine_potential(double amp, double L, double phase = 0.0);

}  // namespace bloch
