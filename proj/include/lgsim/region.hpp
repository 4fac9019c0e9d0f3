#pragma once

// A finite set of lattice points, stored as a membership mask on a window.

#include <cstdint>
#include <vector>

#include "lattice.hpp"

namespace lgsim {

class Region {
public:
    Region() = default;
    explicit Region(const GridWindow& w) : window_(w), mask_(w.size(), 0) {}

    static Region from_points(const GridWindow& w, const std::vector<Point>& pts)
    {
        Region r(w);
        for (const auto& p : pts) r.insert(p);
        return r;
    }

    /// Lattice ball B_r = {|x| < r} on a window that contains it.
    static Region ball(int d, double r)
    {
        const auto L = static_cast<std::int32_t>(std::ceil(std::max(r, 0.0))) + 1;
        GridWindow w(d, L);
        Region out(w);
        for (std::size_t k = 0; k < w.size(); ++k)
            if (in_ball(w.point(k), r)) out.mask_[k] = 1;
        return out;
    }

    [[nodiscard]] const GridWindow& window() const { return window_; }
    [[nodiscard]] int dim() const { return window_.dim(); }
    [[nodiscard]] const std::vector<std::uint8_t>& mask() const { return mask_; }
    std::vector<std::uint8_t>& mask() { return mask_; }

    void insert(const Point& p) { mask_[window_.checked_index(p)] = 1; }
    void erase(const Point& p)
    {
        if (window_.contains(p)) mask_[window_.index(p)] = 0;
    }
    [[nodiscard]] bool contains(const Point& p) const
    {
        return window_.contains(p) && mask_[window_.index(p)] != 0;
    }
    [[nodiscard]] bool contains_index(std::size_t k) const { return mask_[k] != 0; }

    [[nodiscard]] std::size_t count() const
    {
        std::size_t n = 0;
        for (auto v : mask_) n += (v != 0);
        return n;
    }
    [[nodiscard]] bool empty() const { return count() == 0; }

    [[nodiscard]] std::vector<Point> points() const
    {
        std::vector<Point> out;
        for (std::size_t k = 0; k < mask_.size(); ++k)
            if (mask_[k]) out.push_back(window_.point(k));
        return out;
    }

    /// Largest |x_i| over members, or -1 when empty.
    [[nodiscard]] std::int32_t max_abs_coord() const
    {
        std::int32_t m = -1;
        for (std::size_t k = 0; k < mask_.size(); ++k) {
            if (!mask_[k]) continue;
            const Point p = window_.point(k);
            for (int i = 0; i < p.d; ++i) m = std::max(m, std::abs(p[i]));
        }
        return m;
    }

    /// Same set on a different window (points outside `to` are dropped).
    [[nodiscard]] Region on_window(const GridWindow& to) const
    {
        Region out(to);
        out.mask_ = remap(mask_, window_, to, std::uint8_t{0});
        return out;
    }

    /// Set equality independent of the underlying windows.
    friend bool operator==(const Region& a, const Region& b)
    {
        if (a.dim() != b.dim()) return false;
        for (std::size_t k = 0; k < a.mask_.size(); ++k)
            if (a.mask_[k] && !b.contains(a.window_.point(k))) return false;
        for (std::size_t k = 0; k < b.mask_.size(); ++k)
            if (b.mask_[k] && !a.contains(b.window_.point(k))) return false;
        return true;
    }

private:
    GridWindow window_;
    std::vector<std::uint8_t> mask_;
};

}  // namespace lgsim
