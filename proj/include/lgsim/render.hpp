#pragma once

// Binary PPM (P6) images of d = 2 snapshots. Row 0 of an image is the
// largest y, so north is up. Every renderer uses the origin-centered square
// [-h, h]^2 with h the largest |coordinate| of a site it draws.
//
// Palettes
//   rotors: N (0,0,255), E (255,0,0), S (255,255,0), W (0,200,0);
//           unoccupied sites white
//   grains: grains present (pre-placed ones included when H < 0)
//           0 (40,40,40), 1 (0,90,200), 2 (0,170,90), 3 (250,200,0),
//           4 (220,60,40), 5 (150,60,170), 6 (0,190,200), 7 (140,90,40),
//           k >= 8 gray 200 - (k - 8) mod 128; unvisited sites white
//   mass:   gray 255 - round(255 min(max(mass, 0), 1)), so empty is white
//           and full is black

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "divisible.hpp"
#include "lattice.hpp"
#include "region.hpp"
#include "rotor.hpp"
#include "sandpile.hpp"

namespace lgsim {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};

struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h, Rgb fill = kWhite) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3)
    {
        for (std::size_t k = 0; k < rgb.size(); k += 3) {
            rgb[k] = fill[0];
            rgb[k + 1] = fill[1];
            rgb[k + 2] = fill[2];
        }
    }

    void set(int x, int y, Rgb c)
    {
        if (x < 0 || y < 0 || x >= width || y >= height) return;
        const std::size_t k = (static_cast<std::size_t>(y) * width + x) * 3;
        rgb[k] = c[0];
        rgb[k + 1] = c[1];
        rgb[k + 2] = c[2];
    }
    [[nodiscard]] Rgb get(int x, int y) const
    {
        const std::size_t k = (static_cast<std::size_t>(y) * width + x) * 3;
        return {rgb[k], rgb[k + 1], rgb[k + 2]};
    }
};

inline void write_ppm(std::ostream& os, const Image& img)
{
    os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
}

inline void write_ppm_file(const std::string& path, const Image& img)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_ppm(out, img);
}

inline Rgb rotor_color(int dir)
{
    switch (dir) {
    case dir2::N: return {0, 0, 255};
    case dir2::E: return {255, 0, 0};
    case dir2::S: return {255, 255, 0};
    case dir2::W: return {0, 200, 0};
    default: throw ConfigError("rotor direction out of range for d = 2");
    }
}

inline Rgb grain_color(std::int64_t k)
{
    static constexpr std::array<Rgb, 8> table{{{40, 40, 40},
                                               {0, 90, 200},
                                               {0, 170, 90},
                                               {250, 200, 0},
                                               {220, 60, 40},
                                               {150, 60, 170},
                                               {0, 190, 200},
                                               {140, 90, 40}}};
    if (k < 0) throw ConfigError("negative grain count");
    if (k < 8) return table[static_cast<std::size_t>(k)];
    const auto g = static_cast<std::uint8_t>(200 - (k - 8) % 128);
    return {g, g, g};
}

inline Rgb mass_color(double m)
{
    const double v = std::min(std::max(m, 0.0), 1.0);
    const auto g = static_cast<std::uint8_t>(255 - std::lround(255.0 * v));
    return {g, g, g};
}

namespace detail {

inline void require_2d(int d, const char* what)
{
    if (d != 2) throw ConfigError(std::string(what) + ": only d = 2 can be rendered");
}

/// One pixel per site of [-h, h]^2, colored by fn(point) (nullopt = white).
template <class Fn>
Image raster(std::int32_t h, Fn&& fn)
{
    const int side = 2 * h + 1;
    Image img(side, side);
    for (int row = 0; row < side; ++row)
        for (int col = 0; col < side; ++col)
            if (auto c = fn(Point{col - h, h - row})) img.set(col, row, *c);
    return img;
}

}  // namespace detail

/// Rotor image from per-site values: a direction, or -1 for unoccupied.
inline Image render_rotor_values(const GridWindow& w, const std::vector<std::int64_t>& values)
{
    detail::require_2d(w.dim(), "render_rotors");
    std::int32_t h = 0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] < 0) continue;
        const Point p = w.point(k);
        h = std::max({h, std::abs(p[0]), std::abs(p[1])});
    }
    return detail::raster(h, [&](const Point& p) -> std::optional<Rgb> {
        if (!w.contains(p) || values[w.index(p)] < 0) return std::nullopt;
        return rotor_color(static_cast<int>(values[w.index(p)]));
    });
}

/// Per-site rotor values of the occupied region, -1 elsewhere.
inline std::vector<std::int64_t> rotor_values(const RotorField& rotors, const Region& region)
{
    std::vector<std::int64_t> v(rotors.window.size(), -1);
    for (std::size_t k = 0; k < v.size(); ++k)
        if (region.contains(rotors.window.point(k))) v[k] = rotors.rotor[k];
    return v;
}

inline Image render_rotors(const RotorField& rotors, const Region& region)
{
    detail::require_2d(region.dim(), "render_rotors");
    return render_rotor_values(rotors.window, rotor_values(rotors, region));
}

/// Grain image from per-site grain counts, -1 for unvisited sites.
inline Image render_grain_values(const GridWindow& w, const std::vector<std::int64_t>& values)
{
    detail::require_2d(w.dim(), "render_grains");
    std::int32_t h = 0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] < 0) continue;
        const Point p = w.point(k);
        h = std::max({h, std::abs(p[0]), std::abs(p[1])});
    }
    return detail::raster(h, [&](const Point& p) -> std::optional<Rgb> {
        if (!w.contains(p) || values[w.index(p)] < 0) return std::nullopt;
        return grain_color(values[w.index(p)]);
    });
}

/// Grains present per visited site, -1 elsewhere.
inline std::vector<std::int64_t> grain_values(const GrainField& f, VisitedMode mode = VisitedMode::Received)
{
    const Region visited = f.visited(mode);
    std::vector<std::int64_t> v(f.window.size(), -1);
    for (std::size_t k = 0; k < v.size(); ++k)
        if (visited.contains_index(k)) v[k] = f.grains(k);
    return v;
}

inline Image render_grains(const GrainField& f, VisitedMode mode = VisitedMode::Received)
{
    return render_grain_values(f.window, grain_values(f, mode));
}

inline Image render_mass(const MassField& nu)
{
    detail::require_2d(nu.window.dim(), "render_mass");
    std::int32_t h = 0;
    for (std::size_t k = 0; k < nu.mass.size(); ++k) {
        if (nu.mass[k] <= 0.0) continue;
        const Point p = nu.window.point(k);
        h = std::max({h, std::abs(p[0]), std::abs(p[1])});
    }
    return detail::raster(h, [&](const Point& p) -> std::optional<Rgb> { return mass_color(nu.at(p)); });
}

struct InverseSquareOptions {
    double window = 2.0;  ///< the image covers [-W, W]^2 of the w-plane
    int px = 800;
    bool overlay = false;  ///< mark w = (1 + 2a) + 2bi, a, b integers
};

/// Image of the rescaled region sqrt(pi/n) A_n under z -> 1/z^2. Each pixel
/// w is pulled back along the principal branch z = w^{-1/2} and takes the
/// rotor color of the nearest site (white if unoccupied or the origin).
inline Image render_inverse_square(const Region& region, const RotorField& rotors, std::uint64_t n,
                                   const InverseSquareOptions& opt = {})
{
    detail::require_2d(region.dim(), "render_inverse_square");
    if (n == 0 || opt.px <= 0 || !(opt.window > 0.0)) throw ConfigError("render_inverse_square: bad parameters");
    const double scale = std::sqrt(std::numbers::pi / static_cast<double>(n));
    const double pix = 2.0 * opt.window / opt.px;
    Image img(opt.px, opt.px);
    for (int row = 0; row < opt.px; ++row) {
        for (int col = 0; col < opt.px; ++col) {
            const std::complex<double> w(-opt.window + (col + 0.5) * pix, opt.window - (row + 0.5) * pix);
            if (std::abs(w) == 0.0) continue;
            const std::complex<double> z = 1.0 / std::sqrt(w);
            const double sx = std::round(z.real() / scale), sy = std::round(z.imag() / scale);
            if (std::abs(sx) > 1e9 || std::abs(sy) > 1e9) continue;
            const Point p{static_cast<std::int32_t>(sx), static_cast<std::int32_t>(sy)};
            if (p.is_origin() || !region.contains(p)) continue;
            img.set(col, row, rotor_color(rotors.at(p)));
        }
    }
    if (opt.overlay) {
        const auto lim = static_cast<int>(std::ceil(opt.window));
        for (int a = -lim; a <= lim; ++a) {
            for (int b = -lim; b <= lim; ++b) {
                const double re = 1.0 + 2.0 * a, im = 2.0 * b;
                if (std::abs(re) > opt.window || std::abs(im) > opt.window) continue;
                const int col = static_cast<int>(std::floor((re + opt.window) / pix));
                const int row = static_cast<int>(std::floor((opt.window - im) / pix));
                for (int t = -3; t <= 3; ++t) {
                    img.set(col + t, row, kBlack);
                    img.set(col, row + t, kBlack);
                }
            }
        }
    }
    return img;
}

}  // namespace lgsim
