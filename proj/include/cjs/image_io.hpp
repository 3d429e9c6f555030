#pragma once

// Image files: CSV with the real plane (q rows) followed by the imaginary
// plane (q rows), and 8-bit binary PGM of |values| scaled to the maximum.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "cjs/errors.hpp"
#include "cjs/grad_field.hpp"

namespace cjs {

inline void write_image_csv(const std::string& path, const Image& img) {
  std::ofstream out(path);
  if (!out) throw Error("write_image_csv: cannot open " + path);
  out << std::setprecision(17);
  for (int plane = 0; plane < 2; ++plane) {
    for (int r = 0; r < img.q(); ++r) {
      for (int c = 0; c < img.q(); ++c) {
        if (c) out << ',';
        out << (plane == 0 ? img(r, c).real() : img(r, c).imag());
      }
      out << '\n';
    }
  }
}

inline Image read_image_csv(const std::string& path, double spacing) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("read_image_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    rows.push_back(std::move(vals));
  }
  if (rows.size() % 2 != 0) throw InvalidArgument("read_image_csv: expected real and imaginary planes");
  const int q = static_cast<int>(rows.size() / 2);
  Image img(q, spacing);
  for (int r = 0; r < q; ++r) {
    if (rows[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(q) ||
        rows[static_cast<std::size_t>(r + q)].size() != static_cast<std::size_t>(q))
      throw InvalidArgument("read_image_csv: ragged rows");
    for (int c = 0; c < q; ++c)
      img(r, c) = {rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
                   rows[static_cast<std::size_t>(r + q)][static_cast<std::size_t>(c)]};
  }
  return img;
}

inline void write_pgm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_pgm: cannot open " + path);
  double mx = 0.0;
  for (int r = 0; r < img.q(); ++r)
    for (int c = 0; c < img.q(); ++c) mx = std::max(mx, std::abs(img(r, c)));
  out << "P5\n" << img.q() << ' ' << img.q() << "\n255\n";
  for (int r = 0; r < img.q(); ++r) {
    for (int c = 0; c < img.q(); ++c) {
      const double v = mx > 0.0 ? std::abs(img(r, c)) / mx : 0.0;
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
    }
  }
}

}  // namespace cjs
