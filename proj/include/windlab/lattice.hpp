#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace windlab {

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

// Neighbor slots are ordered E, N, W, S.
inline constexpr std::array<Point, 4> kDirections{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

using LatticePath = std::vector<int>;

// Square-lattice domain with a wired outer boundary and a free inner one.
// Vertices are integer points; the hole is centred at the origin.
class AnnularLattice {
public:
    // r < |v| <= R in the Euclidean norm; r = 0 removes the origin only.
    static AnnularLattice disc(double outer_radius, double inner_radius);

    // Square block max(|x|,|y|) <= half_outer minus the block
    // max(|x|,|y|) <= half_hole.  (2, 0) is the 5x5 block minus its centre.
    static AnnularLattice square(int half_outer, int half_hole);

    // Arbitrary point set with explicit boundary labels, used for small test
    // graphs.  Topology checks are optional.
    AnnularLattice(std::vector<Point> points, std::vector<char> outer, std::vector<char> inner,
                   double mesh, bool check_topology);

    int size() const { return static_cast<int>(points_.size()); }
    const Point& point(int v) const { return points_[v]; }
    const std::vector<Point>& points() const { return points_; }

    // -1 marks a missing neighbor.
    const std::array<int, 4>& neighbor_slots(int v) const { return slots_[v]; }
    const std::vector<int>& neighbors(int v) const { return adjacency_[v]; }
    int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }

    bool is_outer(int v) const { return outer_[v] != 0; }
    bool is_inner(int v) const { return inner_[v] != 0; }
    const std::vector<int>& outer_boundary() const { return outer_list_; }
    const std::vector<int>& inner_boundary() const { return inner_list_; }

    // Compact numbering of non-absorbed (non-outer) vertices, -1 for outer.
    int free_index(int v) const { return free_index_[v]; }
    int free_vertex(int i) const { return free_list_[i]; }
    int free_count() const { return static_cast<int>(free_list_.size()); }

    std::optional<int> index_of(Point p) const;
    int at(int x, int y) const;  // throws if absent

    // Direction slot d with neighbor_slots(u)[d] == w, or -1.
    int direction_to(int u, int w) const;

    double mesh() const { return mesh_; }

private:
    AnnularLattice() = default;
    void finish(bool check_topology);

    std::vector<Point> points_;
    std::vector<char> outer_, inner_;
    std::vector<std::array<int, 4>> slots_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<int> outer_list_, inner_list_, free_index_, free_list_;
    int xmin_ = 0, ymin_ = 0, width_ = 0, height_ = 0;
    std::vector<int> grid_;
    double mesh_ = 1.0;
};

// Dual-lattice path from the hole to the outside.  Faces are unit squares
// named by their lower-left corner.  Crossing an edge from the left of the
// dual path to its right counts +1.  A zipper refers to its lattice, which
// must outlive it.
class Zipper {
public:
    // Default cut: the ray y = 1/2, x > 0, crossing {(x,0),(x,1)} for x >= 1.
    // The traversal (x,1) -> (x,0) counts +1.
    static Zipper default_ray(const AnnularLattice& lattice);

    // Staircase cut through faces (0,0), (0,1), (1,1), (1,2), (2,2), ...
    static Zipper staircase(const AnnularLattice& lattice);

    static Zipper from_dual_path(const AnnularLattice& lattice, const std::vector<Point>& faces);

    // No crossings at all; for ungauged computations and test graphs.
    static Zipper none(const AnnularLattice& lattice);

    int crossing_sign(int from, int to) const;  // throws on non-adjacent
    int sign_by_slot(int v, int slot) const { return signs_[v][slot]; }

    // Crossed edges in dual-path order, each as (left vertex, right vertex),
    // i.e. oriented in the +1 direction.
    const std::vector<std::pair<int, int>>& crossed_edges() const { return edges_; }

    // Angle of each vertex on the slit domain: arg around the origin, made
    // single valued by adding 2*pi*sign whenever an edge crosses the cut.
    const std::vector<double>& sheet_angles() const { return sheet_; }

    const AnnularLattice& lattice() const { return *lattice_; }

private:
    const AnnularLattice* lattice_ = nullptr;
    std::vector<std::array<std::int8_t, 4>> signs_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<double> sheet_;
};

int crossing_number(const Zipper& zipper, const LatticePath& path);

// Sorts vertices by sheet angle, which is counterclockwise order starting
// just after the cut.
std::vector<int> canonical_order(const Zipper& zipper, std::vector<int> vertices);

std::string lattice_to_json(const AnnularLattice& lattice, const Zipper* zipper);

} // namespace windlab
