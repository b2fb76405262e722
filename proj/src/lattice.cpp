#include "windlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace windlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long long norm2(int x, int y)
{
    return 1LL * x * x + 1LL * y * y;
}

} // namespace

AnnularLattice AnnularLattice::disc(double outer_radius, double inner_radius)
{
    if (!(inner_radius >= 0.0) || !(outer_radius >= inner_radius + 2.0))
        throw std::invalid_argument("build_annulus: need outer_radius >= inner_radius + 2 and inner_radius >= 0");
    AnnularLattice lat;
    const int R = static_cast<int>(std::floor(outer_radius));
    const double R2 = outer_radius * outer_radius;
    const double r2 = inner_radius * inner_radius;
    auto inside = [&](int x, int y) {
        long long d = norm2(x, y);
        if (d > R2)
            return false;
        if (inner_radius == 0.0)
            return d != 0;
        return d > r2;
    };
    auto in_hole = [&](int x, int y) {
        long long d = norm2(x, y);
        return inner_radius == 0.0 ? d == 0 : d <= r2;
    };
    for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x)
            if (inside(x, y))
                lat.points_.push_back({x, y});
    const std::size_t n = lat.points_.size();
    lat.outer_.assign(n, 0);
    lat.inner_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = lat.points_[i];
        for (const Point& d : kDirections) {
            int x = p.x + d.x, y = p.y + d.y;
            if (norm2(x, y) > R2)
                lat.outer_[i] = 1;
            else if (in_hole(x, y))
                lat.inner_[i] = 1;
        }
    }
    lat.mesh_ = 1.0 / outer_radius;
    lat.finish(true);
    return lat;
}

AnnularLattice AnnularLattice::square(int half_outer, int half_hole)
{
    if (half_hole < 0 || half_outer < half_hole + 2)
        throw std::invalid_argument("square annulus: need half_outer >= half_hole + 2");
    AnnularLattice lat;
    for (int y = -half_outer; y <= half_outer; ++y)
        for (int x = -half_outer; x <= half_outer; ++x)
            if (std::max(std::abs(x), std::abs(y)) > half_hole)
                lat.points_.push_back({x, y});
    const std::size_t n = lat.points_.size();
    lat.outer_.assign(n, 0);
    lat.inner_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = lat.points_[i];
        for (const Point& d : kDirections) {
            int m = std::max(std::abs(p.x + d.x), std::abs(p.y + d.y));
            if (m > half_outer)
                lat.outer_[i] = 1;
            else if (m <= half_hole)
                lat.inner_[i] = 1;
        }
    }
    lat.mesh_ = 1.0 / half_outer;
    lat.finish(true);
    return lat;
}

AnnularLattice::AnnularLattice(std::vector<Point> points, std::vector<char> outer, std::vector<char> inner,
                               double mesh, bool check_topology)
    : points_(std::move(points)), outer_(std::move(outer)), inner_(std::move(inner)), mesh_(mesh)
{
    if (outer_.size() != points_.size() || inner_.size() != points_.size())
        throw std::invalid_argument("AnnularLattice: label arrays must match the point list");
    finish(check_topology);
}

void AnnularLattice::finish(bool check_topology)
{
    const int n = size();
    if (n == 0)
        throw std::invalid_argument("AnnularLattice: empty vertex set");
    xmin_ = ymin_ = INT32_MAX;
    int xmax = INT32_MIN, ymax = INT32_MIN;
    for (const Point& p : points_) {
        xmin_ = std::min(xmin_, p.x);
        ymin_ = std::min(ymin_, p.y);
        xmax = std::max(xmax, p.x);
        ymax = std::max(ymax, p.y);
    }
    width_ = xmax - xmin_ + 1;
    height_ = ymax - ymin_ + 1;
    grid_.assign(static_cast<std::size_t>(width_) * height_, -1);
    for (int v = 0; v < n; ++v) {
        int& cell = grid_[(points_[v].y - ymin_) * width_ + (points_[v].x - xmin_)];
        if (cell >= 0)
            throw std::invalid_argument("AnnularLattice: repeated point");
        cell = v;
    }
    slots_.assign(n, {-1, -1, -1, -1});
    adjacency_.assign(n, {});
    for (int v = 0; v < n; ++v) {
        for (int d = 0; d < 4; ++d) {
            auto w = index_of({points_[v].x + kDirections[d].x, points_[v].y + kDirections[d].y});
            if (w) {
                slots_[v][d] = *w;
                adjacency_[v].push_back(*w);
            }
        }
    }
    outer_list_.clear();
    inner_list_.clear();
    free_list_.clear();
    free_index_.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        if (outer_[v] && inner_[v])
            throw std::invalid_argument("AnnularLattice: a vertex lies on both boundaries");
        if (outer_[v])
            outer_list_.push_back(v);
        else {
            free_index_[v] = static_cast<int>(free_list_.size());
            free_list_.push_back(v);
        }
        if (inner_[v])
            inner_list_.push_back(v);
    }
    if (outer_list_.empty())
        throw std::invalid_argument("AnnularLattice: outer boundary is empty");

    if (!check_topology)
        return;
    if (inner_list_.empty())
        throw std::invalid_argument("AnnularLattice: inner boundary is empty");
    for (int v = 0; v < n; ++v)
        if (adjacency_[v].empty())
            throw std::invalid_argument("AnnularLattice: isolated vertex");

    // Vertex set must be connected.
    std::vector<char> seen(n, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int w : adjacency_[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                queue.push_back(w);
            }
    }
    if (reached != n)
        throw std::invalid_argument("AnnularLattice: domain is disconnected");

    // Complement inside the padded bounding box: exactly one bounded
    // component (8-connectivity), otherwise the domain is not an annulus.
    const int W = width_ + 2, H = height_ + 2;
    std::vector<int> label(static_cast<std::size_t>(W) * H, -1);
    auto occupied = [&](int i, int j) { return grid_[(j - 1) * width_ + (i - 1)] >= 0; };
    auto is_free_cell = [&](int i, int j) {
        if (i == 0 || j == 0 || i == W - 1 || j == H - 1)
            return true;
        return !occupied(i, j);
    };
    int components = 0;
    int bounded = 0;
    for (int j = 0; j < H; ++j) {
        for (int i = 0; i < W; ++i) {
            if (!is_free_cell(i, j) || label[j * W + i] >= 0)
                continue;
            bool touches_border = false;
            std::deque<std::pair<int, int>> q{{i, j}};
            label[j * W + i] = components;
            while (!q.empty()) {
                auto [a, b] = q.front();
                q.pop_front();
                if (a == 0 || b == 0 || a == W - 1 || b == H - 1)
                    touches_border = true;
                for (int db = -1; db <= 1; ++db)
                    for (int da = -1; da <= 1; ++da) {
                        int a2 = a + da, b2 = b + db;
                        if (a2 < 0 || b2 < 0 || a2 >= W || b2 >= H)
                            continue;
                        if (!is_free_cell(a2, b2) || label[b2 * W + a2] >= 0)
                            continue;
                        label[b2 * W + a2] = components;
                        q.push_back({a2, b2});
                    }
            }
            if (!touches_border)
                ++bounded;
            ++components;
        }
    }
    if (bounded != 1)
        throw std::invalid_argument("AnnularLattice: domain is not doubly connected");
}

std::optional<int> AnnularLattice::index_of(Point p) const
{
    int i = p.x - xmin_, j = p.y - ymin_;
    if (i < 0 || j < 0 || i >= width_ || j >= height_)
        return std::nullopt;
    int v = grid_[j * width_ + i];
    if (v < 0)
        return std::nullopt;
    return v;
}

int AnnularLattice::at(int x, int y) const
{
    auto v = index_of({x, y});
    if (!v)
        throw std::out_of_range("lattice point (" + std::to_string(x) + "," + std::to_string(y) + ") not in domain");
    return *v;
}

int AnnularLattice::direction_to(int u, int w) const
{
    for (int d = 0; d < 4; ++d)
        if (slots_[u][d] == w)
            return d;
    return -1;
}

Zipper Zipper::default_ray(const AnnularLattice& lattice)
{
    int xmax = 0;
    for (const Point& p : lattice.points())
        xmax = std::max(xmax, p.x);
    std::vector<Point> faces;
    for (int x = 0; x <= xmax; ++x)
        faces.push_back({x, 0});
    return from_dual_path(lattice, faces);
}

Zipper Zipper::staircase(const AnnularLattice& lattice)
{
    int m = 0;
    for (const Point& p : lattice.points())
        m = std::max({m, std::abs(p.x), std::abs(p.y)});
    std::vector<Point> faces{{0, 0}};
    Point f{0, 0};
    while (f.x <= m && f.y <= m) {
        if (f.x == f.y)
            ++f.y;
        else
            ++f.x;
        faces.push_back(f);
    }
    return from_dual_path(lattice, faces);
}

Zipper Zipper::from_dual_path(const AnnularLattice& lattice, const std::vector<Point>& faces)
{
    Zipper z;
    z.lattice_ = &lattice;
    const int n = lattice.size();
    z.signs_.assign(n, {0, 0, 0, 0});
    for (std::size_t i = 0; i < faces.size(); ++i)
        for (std::size_t j = i + 1; j < faces.size(); ++j)
            if (faces[i] == faces[j])
                throw std::invalid_argument("zipper: dual path is not simple");
    for (std::size_t k = 0; k + 1 < faces.size(); ++k) {
        const Point a = faces[k], b = faces[k + 1];
        const int dx = b.x - a.x, dy = b.y - a.y;
        if (std::abs(dx) + std::abs(dy) != 1)
            throw std::invalid_argument("zipper: consecutive faces are not adjacent");
        // Primal edge shared by the two faces.
        Point p, q;
        if (dx != 0) {
            int x = std::max(a.x, b.x);
            p = {x, a.y};
            q = {x, a.y + 1};
        } else {
            int y = std::max(a.y, b.y);
            p = {a.x, y};
            q = {a.x + 1, y};
        }
        auto pu = lattice.index_of(p), qu = lattice.index_of(q);
        if (!pu || !qu)
            continue;
        // Left side of the dual step is the direction rotated by +90 degrees.
        const int lx = -dy, ly = dx;
        const double mx = a.x + 0.5 + 0.5 * dx, my = a.y + 0.5 + 0.5 * dy;
        const bool p_left = (p.x - mx) * lx + (p.y - my) * ly > 0;
        int left = p_left ? *pu : *qu;
        int right = p_left ? *qu : *pu;
        int d = lattice.direction_to(left, right);
        if (z.signs_[left][d] != 0)
            throw std::invalid_argument("zipper: edge crossed twice");
        z.signs_[left][d] = 1;
        z.signs_[right][(d + 2) % 4] = -1;
        z.edges_.push_back({left, right});
    }

    // Sheet angles by breadth-first search, then a consistency check on every
    // edge.  Failure means the cut does not separate the hole correctly.
    z.sheet_.assign(n, 0.0);
    std::vector<char> seen(n, 0);
    for (int s = 0; s < n; ++s) {
        if (seen[s])
            continue;
        const Point ps = lattice.point(s);
        double a0 = std::atan2(static_cast<double>(ps.y), static_cast<double>(ps.x));
        if (a0 < 0)
            a0 += kTwoPi;
        z.sheet_[s] = a0;
        seen[s] = 1;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            const Point pu = lattice.point(u);
            for (int d = 0; d < 4; ++d) {
                int w = lattice.neighbor_slots(u)[d];
                if (w < 0 || seen[w])
                    continue;
                const Point pw = lattice.point(w);
                double step = std::arg(std::complex<double>(pw.x, pw.y) / std::complex<double>(pu.x, pu.y));
                z.sheet_[w] = z.sheet_[u] + step + kTwoPi * z.signs_[u][d];
                seen[w] = 1;
                queue.push_back(w);
            }
        }
    }
    for (int u = 0; u < n; ++u) {
        const Point pu = lattice.point(u);
        if (pu.x == 0 && pu.y == 0)
            throw std::invalid_argument("zipper: the origin must lie in the hole");
        for (int d = 0; d < 4; ++d) {
            int w = lattice.neighbor_slots(u)[d];
            if (w < 0)
                continue;
            const Point pw = lattice.point(w);
            double step = std::arg(std::complex<double>(pw.x, pw.y) / std::complex<double>(pu.x, pu.y));
            double gap = z.sheet_[w] - z.sheet_[u] - step - kTwoPi * z.signs_[u][d];
            if (std::abs(gap) > 1e-9)
                throw std::invalid_argument("zipper: cut does not connect the hole to the outside");
        }
    }
    // Put the smallest sheet angle in [0, 2*pi).
    double lo = *std::min_element(z.sheet_.begin(), z.sheet_.end());
    double shift = -kTwoPi * std::floor(lo / kTwoPi);
    for (double& a : z.sheet_)
        a += shift;
    return z;
}

Zipper Zipper::none(const AnnularLattice& lattice)
{
    Zipper z;
    z.lattice_ = &lattice;
    z.signs_.assign(lattice.size(), {0, 0, 0, 0});
    z.sheet_.assign(lattice.size(), 0.0);
    return z;
}

int Zipper::crossing_sign(int from, int to) const
{
    int d = lattice_->direction_to(from, to);
    if (d < 0)
        throw std::invalid_argument("crossing_sign: vertices are not adjacent");
    return signs_[from][d];
}

int crossing_number(const Zipper& zipper, const LatticePath& path)
{
    int k = 0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        k += zipper.crossing_sign(path[i], path[i + 1]);
    return k;
}

std::vector<int> canonical_order(const Zipper& zipper, std::vector<int> vertices)
{
    const auto& a = zipper.sheet_angles();
    std::stable_sort(vertices.begin(), vertices.end(), [&](int u, int w) { return a[u] < a[w]; });
    return vertices;
}

std::string lattice_to_json(const AnnularLattice& lattice, const Zipper* zipper)
{
    nlohmann::json j;
    j["mesh"] = lattice.mesh();
    auto& verts = j["vertices"];
    verts = nlohmann::json::array();
    for (int v = 0; v < lattice.size(); ++v) {
        const Point p = lattice.point(v);
        std::string label = lattice.is_outer(v) ? "outer" : (lattice.is_inner(v) ? "inner" : "interior");
        verts.push_back({p.x, p.y, label});
    }
    if (zipper) {
        auto& edges = j["zipper"];
        edges = nlohmann::json::array();
        for (auto [l, r] : zipper->crossed_edges()) {
            const Point a = lattice.point(l), b = lattice.point(r);
            edges.push_back({a.x, a.y, b.x, b.y});
        }
    }
    return j.dump();
}

} // namespace windlab
