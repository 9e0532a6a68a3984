#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gepase/domain.hpp"

namespace gepase::grid2d {

/// Costs are move lengths in cell units scaled by 1000 and rounded to the
/// nearest integer, so queue ordering is exact.
inline constexpr Cost kCellScale = 1000;
/// Per-cell weights of the distance lower bound. 1414 <= 1000*sqrt(2) keeps
/// the bound admissible against rounded diagonal move costs while staying an
/// exact integer metric (octile distance is realizable by a unit-grid path,
/// so the triangle inequality holds with no rounding slack).
inline constexpr Cost kCardinalUnit = 1000;
inline constexpr Cost kDiagonalUnit = 1414;

struct GridPoint {
    int x = 0;
    int y = 0;
};
inline bool operator==(const GridPoint& a, const GridPoint& b) {
    return a.x == b.x && a.y == b.y;
}
inline bool operator!=(const GridPoint& a, const GridPoint& b) { return !(a == b); }

struct GridMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> occupancy; // row-major, nonzero = blocked
    std::string name;

    /// Queries outside [0,width) x [0,height) report blocked.
    bool is_blocked(int x, int y) const {
        if (x < 0 || y < 0 || x >= width || y >= height) return true;
        return occupancy[std::size_t(y) * std::size_t(width) + std::size_t(x)] != 0;
    }
    std::uint8_t& at(int x, int y) {
        return occupancy[std::size_t(y) * std::size_t(width) + std::size_t(x)];
    }
    std::size_t blocked_count() const {
        std::size_t n = 0;
        for (auto c : occupancy) n += (c != 0);
        return n;
    }
};

class MapParseError : public std::runtime_error {
public:
    MapParseError(int line, const std::string& what)
        : std::runtime_error("map parse error at line " + std::to_string(line) + ": " + what),
          line_number(line) {}
    int line_number;
};

/// MovingAI .map text format: `type <t>`, `height <H>`, `width <W>`, `map`,
/// then H rows of W glyphs. `.` and `G` are passable; `@ O T W S` blocked.
inline GridMap load_movingai_map(std::istream& in, const std::string& name = "") {
    int line_no = 0;
    auto next_line = [&](std::string& out) {
        if (!std::getline(in, out)) return false;
        ++line_no;
        if (!out.empty() && out.back() == '\r') out.pop_back();
        return true;
    };
    auto expect_field = [&](const char* key) -> long {
        std::string line;
        if (!next_line(line)) throw MapParseError(line_no + 1, std::string("missing '") + key + "' header");
        std::istringstream ss(line);
        std::string k;
        long value = -1;
        ss >> k >> value;
        if (k != key || value < 0 || ss.fail())
            throw MapParseError(line_no, std::string("expected '") + key + " <n>', got '" + line + "'");
        return value;
    };

    std::string line;
    if (!next_line(line)) throw MapParseError(1, "empty input, expected 'type' header");
    if (line.rfind("type", 0) != 0)
        throw MapParseError(line_no, "expected 'type <t>' header, got '" + line + "'");
    const long height = expect_field("height");
    const long width = expect_field("width");
    if (!next_line(line) || line != "map")
        throw MapParseError(line_no + (in ? 0 : 1), "expected 'map' separator");
    if (width == 0 || height == 0) throw MapParseError(line_no, "zero map dimensions");

    GridMap map;
    map.width = static_cast<int>(width);
    map.height = static_cast<int>(height);
    map.name = name;
    map.occupancy.resize(std::size_t(width) * std::size_t(height), 0);
    for (long y = 0; y < height; ++y) {
        if (!next_line(line))
            throw MapParseError(line_no + 1, "missing map row " + std::to_string(y));
        if (static_cast<long>(line.size()) != width)
            throw MapParseError(line_no, "row has " + std::to_string(line.size()) +
                                             " glyphs, expected " + std::to_string(width));
        for (long x = 0; x < width; ++x) {
            switch (line[std::size_t(x)]) {
                case '.':
                case 'G':
                    break;
                case '@':
                case 'O':
                case 'T':
                case 'W':
                case 'S':
                    map.at(static_cast<int>(x), static_cast<int>(y)) = 1;
                    break;
                default:
                    throw MapParseError(line_no, std::string("unknown glyph '") +
                                                     line[std::size_t(x)] + "'");
            }
        }
    }
    return map;
}

inline GridMap load_movingai_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open map file: " + path);
    return load_movingai_map(in, path);
}

/// Each source cell becomes a factor x factor block of identical occupancy.
inline GridMap scale_map(const GridMap& src, int factor) {
    assert(factor >= 1);
    if (factor == 1) return src;
    GridMap out;
    out.width = src.width * factor;
    out.height = src.height * factor;
    out.name = src.name;
    out.occupancy.resize(std::size_t(out.width) * std::size_t(out.height), 0);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(x, y) = src.is_blocked(x / factor, y / factor) ? 1 : 0;
    return out;
}

/// True iff every cell of the side x side square anchored at its minimum
/// corner (x, y) is inside the map and unblocked.
inline bool footprint_feasible(const GridMap& map, int x, int y, int side) {
    assert(side >= 1);
    if (x < 0 || y < 0 || x + side > map.width || y + side > map.height) return false;
    for (int dy = 0; dy < side; ++dy) {
        const std::uint8_t* row =
            map.occupancy.data() + std::size_t(y + dy) * std::size_t(map.width) + std::size_t(x);
        for (int dx = 0; dx < side; ++dx)
            if (row[dx] != 0) return false;
    }
    return true;
}

struct Move {
    int dx = 0; // unit direction per interpolation step
    int dy = 0;
    Cost cost = 0;
    bool diagonal = false;
};

/// The 8 compass moves of `step` cells. Diagonal interpolation advances both
/// axes one cell per unit step; cost is the Euclidean move length, scaled.
inline std::array<Move, 8> make_moves(int step) {
    const Cost cardinal = Cost(step) * kCellScale;
    const Cost diagonal =
        static_cast<Cost>(std::llround(double(step) * double(kCellScale) * std::sqrt(2.0)));
    return {{
        {+1, 0, cardinal, false},  // E
        {+1, +1, diagonal, true},  // NE
        {0, +1, cardinal, false},  // N
        {-1, +1, diagonal, true},  // NW
        {-1, 0, cardinal, false},  // W
        {-1, -1, diagonal, true},  // SW
        {0, -1, cardinal, false},  // S
        {+1, -1, diagonal, true},  // SE
    }};
}

/// Swept feasibility: footprint checked at every interpolated position along
/// the move, endpoint included (the source position is assumed feasible).
inline bool move_feasible(const GridMap& map, GridPoint from, const Move& mv, int step,
                          int side) {
    for (int i = 1; i <= step; ++i)
        if (!footprint_feasible(map, from.x + mv.dx * i, from.y + mv.dy * i, side))
            return false;
    return true;
}

/// Exact integer distance lower bound between cells (octile metric). It is
/// the shortest-path distance on the unit 8-connected grid under per-cell
/// weights (1000, 1414), hence symmetric and exactly triangle-consistent,
/// and it never exceeds the cost of any move sequence between its endpoints.
inline Cost octile_distance(GridPoint a, GridPoint b) {
    const Cost dx = std::abs(a.x - b.x);
    const Cost dy = std::abs(a.y - b.y);
    const Cost hi = std::max(dx, dy);
    const Cost lo = std::min(dx, dy);
    return (hi - lo) * kCardinalUnit + lo * kDiagonalUnit;
}

enum class ActionClassMode {
    Mixed,        // 4 cardinals cheap, 4 diagonals expensive
    AllCheap,     // degenerate: A^e empty
    AllExpensive, // degenerate: A^c empty
};

struct GridWorldOptions {
    int footprint_side = 32;
    int step = 25;
    /// Target mean evaluation-time ratio expensive:cheap. <= 1 disables the
    /// simulated delay entirely.
    double rc = 1.0;
    ActionClassMode class_mode = ActionClassMode::Mixed;
    /// Measured mean cheap evaluation time; when > 0 the constructor skips
    /// self-calibration (lets a harness calibrate once per map).
    double precalibrated_cheap_ns = 0.0;
    int calibration_samples = 256;
};

/// The 2D grid-world benchmark domain. States are cell coordinates with
/// dense ids (y * width + x); the map, action table and calibration constant
/// are immutable after construction, so generate_successor is reentrant.
class GridWorld final : public Domain {
public:
    GridWorld(GridMap map, GridPoint goal, GridWorldOptions opts = {})
        : map_(std::move(map)), goal_(goal), opts_(opts), moves_(make_moves(opts.step)) {
        actions_.reserve(8);
        for (int i = 0; i < 8; ++i) {
            ActionClass cls;
            switch (opts_.class_mode) {
                case ActionClassMode::AllCheap: cls = ActionClass::Cheap; break;
                case ActionClassMode::AllExpensive: cls = ActionClass::Expensive; break;
                default:
                    cls = moves_[std::size_t(i)].diagonal ? ActionClass::Expensive
                                                          : ActionClass::Cheap;
            }
            actions_.push_back(ActionId{i, cls});
        }
        calibrate();
    }

    StateId state_of(GridPoint p) const {
        assert(p.x >= 0 && p.y >= 0 && p.x < map_.width && p.y < map_.height);
        return StateId(p.y) * StateId(map_.width) + StateId(p.x);
    }
    GridPoint point_of(StateId s) const {
        return GridPoint{int(s % StateId(map_.width)), int(s / StateId(map_.width))};
    }

    const GridMap& map() const { return map_; }
    GridPoint goal() const { return goal_; }
    const GridWorldOptions& options() const { return opts_; }
    double calibrated_cheap_ns() const { return cheap_ns_; }
    double burn_ns() const { return burn_ns_; }

    const std::vector<ActionId>& actions() const override { return actions_; }

    std::optional<Successor> generate_successor(const EdgeKey& edge) override {
        assert(edge.action.index >= 0 && edge.action.index < 8);
        const Move& mv = moves_[std::size_t(edge.action.index)];
        const GridPoint from = point_of(edge.state);
        std::optional<Successor> out;
        if (move_feasible(map_, from, mv, opts_.step, opts_.footprint_side)) {
            const GridPoint to{from.x + mv.dx * opts_.step, from.y + mv.dy * opts_.step};
            out = Successor{state_of(to), mv.cost};
        }
        if (burn_ns_ > 0.0 &&
            actions_[std::size_t(edge.action.index)].cls == ActionClass::Expensive)
            burn(burn_ns_);
        return out;
    }

    Cost heuristic(StateId s) override { return octile_distance(point_of(s), goal_); }

    Cost pairwise_heuristic(StateId a, StateId b) override {
        return octile_distance(point_of(a), point_of(b));
    }

    bool is_goal(StateId s) override { return s == state_of(goal_); }

    std::size_t state_space_hint() const override {
        return std::size_t(map_.width) * std::size_t(map_.height);
    }

private:
    using Clock = std::chrono::steady_clock;

    static void burn(double ns) {
        const auto until =
            Clock::now() + std::chrono::nanoseconds(static_cast<std::int64_t>(ns));
        while (Clock::now() < until) {
            // busy loop: the simulated feasibility work is compute-bound
        }
    }

    /// Measure the mean cheap (cardinal, undelayed) evaluation time on this
    /// map and derive the expensive-action burn so the mean time ratio lands
    /// near rc. Runs once, before any planning.
    void calibrate() {
        if (opts_.rc <= 1.0) return;
        double cheap_ns = opts_.precalibrated_cheap_ns;
        if (cheap_ns <= 0.0) {
            std::vector<GridPoint> anchors;
            const int stride = std::max(1, map_.width * map_.height /
                                               std::max(1, opts_.calibration_samples * 4));
            for (int i = 0; i < map_.width * map_.height &&
                            int(anchors.size()) < opts_.calibration_samples;
                 i += stride) {
                const GridPoint p{i % map_.width, i / map_.width};
                if (footprint_feasible(map_, p.x, p.y, opts_.footprint_side))
                    anchors.push_back(p);
            }
            if (anchors.empty()) anchors.push_back(GridPoint{0, 0});
            std::size_t count = 0;
            const auto t0 = Clock::now();
            do {
                for (const auto& p : anchors) {
                    for (const auto& mv : moves_) {
                        if (mv.diagonal) continue;
                        volatile bool ok =
                            move_feasible(map_, p, mv, opts_.step, opts_.footprint_side);
                        (void)ok;
                        ++count;
                    }
                }
            } while (Clock::now() - t0 < std::chrono::milliseconds(5));
            cheap_ns = std::chrono::duration<double, std::nano>(Clock::now() - t0).count() /
                       double(count);
        }
        cheap_ns_ = cheap_ns;
        burn_ns_ = (opts_.rc - 1.0) * cheap_ns_;
    }

    GridMap map_;
    GridPoint goal_;
    GridWorldOptions opts_;
    std::array<Move, 8> moves_;
    std::vector<ActionId> actions_;
    double cheap_ns_ = 0.0;
    double burn_ns_ = 0.0;
};

} // namespace gepase::grid2d
