#pragma once

// Lattice geometry shared by every engine: points of Z^d, the 2d cardinal
// directions, cyclic rotor orders, Euclidean balls and shells, and a dense
// origin-centered window [-L, L]^d with a flat index.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lgsim {

inline constexpr int kMaxDim = 4;

// ---------------------------------------------------------------------------
// Errors

/// Raised when an engine would have to write outside its window.
class WindowOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for invalid parameters or configurations.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a window would exceed the configured memory cap.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an iterative procedure hits its iteration cap.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Point

/// A point of Z^d, 2 <= d <= kMaxDim.
struct Point {
    int d = 2;
    std::array<std::int32_t, kMaxDim> c{};

    Point() = default;
    explicit Point(int dim) : d(dim) {}
    Point(std::initializer_list<std::int32_t> coords) : d(static_cast<int>(coords.size()))
    {
        if (d < 1 || d > kMaxDim) throw ConfigError("Point: unsupported dimension");
        std::copy(coords.begin(), coords.end(), c.begin());
    }

    static Point origin(int dim) { return Point(dim); }
    static Point axis(int dim, int i, std::int32_t len = 1)
    {
        Point p(dim);
        p.c[static_cast<std::size_t>(i)] = len;
        return p;
    }

    std::int32_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
    std::int32_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

    [[nodiscard]] std::int64_t norm2() const
    {
        std::int64_t s = 0;
        for (int i = 0; i < d; ++i) s += std::int64_t{c[i]} * c[i];
        return s;
    }
    [[nodiscard]] double norm() const { return std::sqrt(static_cast<double>(norm2())); }
    [[nodiscard]] bool is_origin() const { return norm2() == 0; }

    friend bool operator==(const Point& a, const Point& b)
    {
        if (a.d != b.d) return false;
        for (int i = 0; i < a.d; ++i)
            if (a.c[i] != b.c[i]) return false;
        return true;
    }
    friend bool operator<(const Point& a, const Point& b)
    {
        if (a.d != b.d) return a.d < b.d;
        for (int i = 0; i < a.d; ++i)
            if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
        return false;
    }
    friend Point operator+(Point a, const Point& b)
    {
        for (int i = 0; i < a.d; ++i) a.c[i] += b.c[i];
        return a;
    }
    friend Point operator-(Point a, const Point& b)
    {
        for (int i = 0; i < a.d; ++i) a.c[i] -= b.c[i];
        return a;
    }
    friend std::ostream& operator<<(std::ostream& os, const Point& p)
    {
        os << '(';
        for (int i = 0; i < p.d; ++i) os << (i ? "," : "") << p.c[i];
        return os << ')';
    }
};

inline std::string to_string(const Point& p)
{
    std::string s = "(";
    for (int i = 0; i < p.d; ++i) s += (i ? "," : "") + std::to_string(p.c[i]);
    return s + ")";
}

inline void check_dimension(int d)
{
    if (d < 2 || d > kMaxDim)
        throw ConfigError("dimension must be in [2, " + std::to_string(kMaxDim) + "], got " +
                          std::to_string(d));
}

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d)
{
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

/// Radius r with omega_d r^d = volume.
inline double radius_for_volume(double volume, int d)
{
    return std::pow(volume / unit_ball_volume(d), 1.0 / d);
}

// ---------------------------------------------------------------------------
// Directions
//
// Direction index 2*axis + (sign < 0). In d = 2 axis 0 is x (east) and
// axis 1 is y (north): E = 0, W = 1, N = 2, S = 3.

struct Direction {
    int index = 0;

    [[nodiscard]] int axis() const { return index / 2; }
    [[nodiscard]] int sign() const { return (index % 2 == 0) ? 1 : -1; }

    static Direction from(int axis, int sign) { return Direction{2 * axis + (sign < 0 ? 1 : 0)}; }
    friend bool operator==(Direction a, Direction b) { return a.index == b.index; }
};

namespace dir2 {
inline constexpr int E = 0;
inline constexpr int W = 1;
inline constexpr int N = 2;
inline constexpr int S = 3;
}  // namespace dir2

inline Point step(const Point& p, Direction dir)
{
    Point q = p;
    q[dir.axis()] += dir.sign();
    return q;
}

/// Cyclic ordering of the 2d directions used to advance rotors.
class CyclicOrder {
public:
    CyclicOrder() : CyclicOrder(standard(2)) {}

    explicit CyclicOrder(std::vector<int> perm) : perm_(std::move(perm))
    {
        const int n = static_cast<int>(perm_.size());
        if (n % 2 != 0 || n / 2 < 2 || n / 2 > kMaxDim)
            throw ConfigError("CyclicOrder: need 2d entries with 2 <= d <= " +
                              std::to_string(kMaxDim));
        std::vector<int> seen(static_cast<std::size_t>(n), 0);
        for (int v : perm_) {
            if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]++)
                throw ConfigError("CyclicOrder: not a permutation of 0..2d-1");
        }
        position_.assign(static_cast<std::size_t>(n), 0);
        next_.assign(static_cast<std::size_t>(n), 0);
        for (int k = 0; k < n; ++k) {
            position_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(k)])] = k;
            next_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(k)])] =
                perm_[static_cast<std::size_t>((k + 1) % n)];
        }
    }

    /// d = 2: N, E, S, W (clockwise). d >= 3: +e1, -e1, +e2, -e2, ...
    static CyclicOrder standard(int d)
    {
        check_dimension(d);
        if (d == 2) return CyclicOrder({dir2::N, dir2::E, dir2::S, dir2::W});
        std::vector<int> perm(static_cast<std::size_t>(2 * d));
        for (int i = 0; i < 2 * d; ++i) perm[static_cast<std::size_t>(i)] = i;
        return CyclicOrder(std::move(perm));
    }

    /// Parses "NESW"-style letters (d = 2) or a comma separated list of
    /// direction indices ("2,0,3,1").
    static CyclicOrder parse(std::string_view text, int d)
    {
        std::vector<int> perm;
        const bool letters = !text.empty() && text.find_first_of("NESWnesw") != std::string_view::npos;
        if (letters) {
            if (d != 2) throw ConfigError("letter orders are only defined for d = 2");
            for (char ch : text) {
                switch (ch) {
                case 'N': case 'n': perm.push_back(dir2::N); break;
                case 'E': case 'e': perm.push_back(dir2::E); break;
                case 'S': case 's': perm.push_back(dir2::S); break;
                case 'W': case 'w': perm.push_back(dir2::W); break;
                default: throw ConfigError("bad direction letter in order: " + std::string(text));
                }
            }
        } else {
            std::size_t pos = 0;
            while (pos < text.size()) {
                std::size_t comma = text.find(',', pos);
                if (comma == std::string_view::npos) comma = text.size();
                perm.push_back(std::stoi(std::string(text.substr(pos, comma - pos))));
                pos = comma + 1;
            }
        }
        if (static_cast<int>(perm.size()) != 2 * d)
            throw ConfigError("order must list all 2d directions");
        return CyclicOrder(std::move(perm));
    }

    [[nodiscard]] int dim() const { return static_cast<int>(perm_.size()) / 2; }
    [[nodiscard]] int size() const { return static_cast<int>(perm_.size()); }
    [[nodiscard]] int next(int dir) const { return next_[static_cast<std::size_t>(dir)]; }
    [[nodiscard]] int at(int k) const { return perm_[static_cast<std::size_t>(k)]; }
    [[nodiscard]] int position(int dir) const { return position_[static_cast<std::size_t>(dir)]; }
    [[nodiscard]] const std::vector<int>& permutation() const { return perm_; }

    /// Direction reached from `dir` after `k` advances.
    [[nodiscard]] int advance(int dir, std::uint64_t k) const
    {
        const auto n = static_cast<std::uint64_t>(perm_.size());
        return perm_[static_cast<std::size_t>((static_cast<std::uint64_t>(position(dir)) + k % n) % n)];
    }

    [[nodiscard]] std::string to_string() const
    {
        std::string s;
        if (dim() == 2) {
            for (int v : perm_) s += "EWNS"[v];
            return s;
        }
        for (std::size_t i = 0; i < perm_.size(); ++i) s += (i ? "," : "") + std::to_string(perm_[i]);
        return s;
    }

    friend bool operator==(const CyclicOrder& a, const CyclicOrder& b) { return a.perm_ == b.perm_; }

private:
    std::vector<int> perm_;
    std::vector<int> position_;
    std::vector<int> next_;
};

/// The 2d lattice neighbors of p, listed in the given cyclic order.
inline std::vector<Point> neighbors(const Point& p, const CyclicOrder& order)
{
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(order.size()));
    for (int k = 0; k < order.size(); ++k) out.push_back(step(p, Direction{order.at(k)}));
    return out;
}

inline std::vector<Point> neighbors(const Point& p) { return neighbors(p, CyclicOrder::standard(p.d)); }

// ---------------------------------------------------------------------------
// Balls and shells

/// |p| < r.
inline bool in_ball(const Point& p, double r)
{
    if (r <= 0.0) return false;
    return static_cast<double>(p.norm2()) < r * r;
}

/// rho <= |p| < rho + 1.
inline bool in_shell(const Point& p, std::int64_t rho)
{
    const std::int64_t n2 = p.norm2();
    return rho * rho <= n2 && n2 < (rho + 1) * (rho + 1);
}

// ---------------------------------------------------------------------------
// GridWindow

/// Dense window [-L, L]^d. Axis 0 varies fastest in the flat index.
class GridWindow {
public:
    GridWindow() = default;
    GridWindow(int d, std::int32_t half_width) : d_(d), L_(half_width)
    {
        check_dimension(d);
        if (half_width < 0) throw ConfigError("GridWindow: negative half-width");
        side_ = 2 * static_cast<std::int64_t>(L_) + 1;
        std::int64_t s = 1;
        for (int i = 0; i < d_; ++i) {
            stride_[static_cast<std::size_t>(i)] = s;
            s *= side_;
        }
        size_ = static_cast<std::size_t>(s);
        center_ = 0;
        for (int i = 0; i < d_; ++i) center_ += static_cast<std::size_t>(L_ * stride_[static_cast<std::size_t>(i)]);
    }

    [[nodiscard]] int dim() const { return d_; }
    [[nodiscard]] std::int32_t half_width() const { return L_; }
    [[nodiscard]] std::int64_t side() const { return side_; }
    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] std::int64_t stride(int axis) const { return stride_[static_cast<std::size_t>(axis)]; }
    [[nodiscard]] std::size_t origin_index() const { return center_; }

    /// Signed flat-index offset of a unit step along `dir`.
    [[nodiscard]] std::ptrdiff_t offset(Direction dir) const
    {
        return static_cast<std::ptrdiff_t>(dir.sign() * stride_[static_cast<std::size_t>(dir.axis())]);
    }

    [[nodiscard]] bool contains(const Point& p) const
    {
        if (p.d != d_) return false;
        for (int i = 0; i < d_; ++i)
            if (p[i] < -L_ || p[i] > L_) return false;
        return true;
    }

    /// All coordinates strictly inside (-L, L): every neighbor is in the window.
    [[nodiscard]] bool interior(const Point& p) const
    {
        for (int i = 0; i < d_; ++i)
            if (p[i] <= -L_ || p[i] >= L_) return false;
        return true;
    }

    [[nodiscard]] std::size_t index(const Point& p) const
    {
        std::int64_t k = 0;
        for (int i = 0; i < d_; ++i) k += (p[i] + std::int64_t{L_}) * stride_[static_cast<std::size_t>(i)];
        return static_cast<std::size_t>(k);
    }

    [[nodiscard]] std::size_t checked_index(const Point& p) const
    {
        if (!contains(p)) throw WindowOverflow("point " + to_string(p) + " outside window of half-width " + std::to_string(L_));
        return index(p);
    }

    [[nodiscard]] Point point(std::size_t k) const
    {
        Point p(d_);
        auto rem = static_cast<std::int64_t>(k);
        for (int i = 0; i < d_; ++i) {
            p[i] = static_cast<std::int32_t>(rem % side_ - L_);
            rem /= side_;
        }
        return p;
    }

    /// Per-site flag: 1 if the site lies on the outer face of the window.
    [[nodiscard]] std::vector<std::uint8_t> boundary_mask() const
    {
        std::vector<std::uint8_t> mask(size_, 0);
        for (std::size_t k = 0; k < size_; ++k) mask[k] = interior(point(k)) ? 0 : 1;
        return mask;
    }

    friend bool operator==(const GridWindow& a, const GridWindow& b) { return a.d_ == b.d_ && a.L_ == b.L_; }

private:
    int d_ = 2;
    std::int32_t L_ = 0;
    std::int64_t side_ = 1;
    std::array<std::int64_t, kMaxDim> stride_{};
    std::size_t size_ = 1;
    std::size_t center_ = 0;
};

/// Copies `src` (laid out on `from`) into a field on `to`, filling new sites.
template <class T>
std::vector<T> remap(const std::vector<T>& src, const GridWindow& from, const GridWindow& to, T fill = T{})
{
    std::vector<T> dst(to.size(), fill);
    for (std::size_t k = 0; k < from.size(); ++k) {
        const Point p = from.point(k);
        if (to.contains(p)) dst[to.index(p)] = src[k];
    }
    return dst;
}

/// A value per site of a window.
template <class T>
struct Field {
    GridWindow window;
    std::vector<T> values;

    Field() = default;
    explicit Field(const GridWindow& w, T fill = T{}) : window(w), values(w.size(), fill) {}

    T& operator[](std::size_t k) { return values[k]; }
    const T& operator[](std::size_t k) const { return values[k]; }
    T& at(const Point& p) { return values[window.checked_index(p)]; }
    [[nodiscard]] T at(const Point& p) const
    {
        return window.contains(p) ? values[window.index(p)] : T{};
    }
    void regrow(const GridWindow& to, T fill = T{})
    {
        values = remap(values, window, to, fill);
        window = to;
    }
};

// ---------------------------------------------------------------------------
// Window sizing

struct MarginPolicy {
    double scale = 2.0;      ///< multiplies (r^{1-1/d} log(r+2) + additive)
    double additive = 16.0;
    std::size_t bytes_per_site = 16;
    std::size_t mem_cap_mb = 0;  ///< 0: take LGSIM_MEM_CAP_MB or the built-in default
};

inline std::size_t memory_cap_mb(const MarginPolicy& policy)
{
    if (policy.mem_cap_mb != 0) return policy.mem_cap_mb;
    if (const char* env = std::getenv("LGSIM_MEM_CAP_MB")) {
        const long long v = std::atoll(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 4096;
}

/// Margin added to the nominal radius r when sizing a window.
inline double window_margin(double r, int d, const MarginPolicy& policy = {})
{
    return policy.scale * (std::pow(r, 1.0 - 1.0 / d) * std::log(r + 2.0) + policy.additive);
}

/// Window for a cluster of volume `n_or_m` (n = omega_d r^d), sized to
/// contain the outer shape bound with a margin.
inline GridWindow window_for(double n_or_m, int d, const MarginPolicy& policy = {})
{
    check_dimension(d);
    if (!(n_or_m > 0.0)) throw ConfigError("window_for: size must be positive");
    const double r = radius_for_volume(n_or_m, d);
    const double L = std::ceil(r + window_margin(r, d, policy));
    if (L > 1.0e9) throw CapacityError("window_for: half-width overflow");
    const double sites = std::pow(2.0 * L + 1.0, d);
    const double bytes = sites * static_cast<double>(policy.bytes_per_site);
    const double cap = static_cast<double>(memory_cap_mb(policy)) * 1024.0 * 1024.0;
    if (bytes > cap)
        throw CapacityError("window of half-width " + std::to_string(static_cast<long long>(L)) +
                            " needs " + std::to_string(static_cast<long long>(bytes / 1048576.0)) +
                            " MB, cap is " + std::to_string(memory_cap_mb(policy)) + " MB");
    return GridWindow(d, static_cast<std::int32_t>(L));
}

/// Window twice as wide, for copy-regrow after an overflow.
inline GridWindow grown(const GridWindow& w, const MarginPolicy& policy = {})
{
    const std::int32_t L = std::max<std::int32_t>(2 * w.half_width(), w.half_width() + 8);
    const double bytes = std::pow(2.0 * L + 1.0, w.dim()) * static_cast<double>(policy.bytes_per_site);
    if (bytes > static_cast<double>(memory_cap_mb(policy)) * 1048576.0)
        throw CapacityError("regrow would exceed memory cap");
    return GridWindow(w.dim(), L);
}

}  // namespace lgsim
