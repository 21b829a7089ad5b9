#include "fgforge/coeff_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fgforge/errors.hpp"

namespace fgforge {

namespace {

constexpr int kSummaryModes[4][3] = {
    {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

ModeSample mode_projection(const ScalarField& f, const int (&k)[3]) {
  ModeSample m;
  m.k = {k[0], k[1], k[2]};
  const GridSpec& grid = f.grid();
  double cs = 0.0, sn = 0.0;
  for (int i1 = 0; i1 < grid.n; ++i1) {
    for (int i2 = 0; i2 < grid.n; ++i2) {
      for (int i3 = 0; i3 < grid.n; ++i3) {
        double phase = k[0] * grid.coord(i1) + k[1] * grid.coord(i2) +
                       k[2] * grid.coord(i3);
        double v = f.at(i1, i2, i3);
        cs += v * std::cos(phase);
        sn += v * std::sin(phase);
      }
    }
  }
  double scale = (k[0] == 0 && k[1] == 0 && k[2] == 0) ? 1.0 : 2.0;
  m.amp_cos = scale * cs / static_cast<double>(grid.points());
  m.amp_sin = scale * sn / static_cast<double>(grid.points());
  return m;
}

// Pulls the next whitespace-delimited token or fails with context.
std::string next_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) {
    throw ParseError(std::string("unexpected end of file, wanted ") + what);
  }
  return tok;
}

void expect_token(std::istream& in, const std::string& want) {
  std::string tok = next_token(in, want.c_str());
  if (tok != want) {
    throw ParseError("expected \"" + want + "\", found \"" + tok + "\"");
  }
}

long parse_int(const std::string& tok, const char* what) {
  char* end = nullptr;
  long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') {
    throw ParseError(std::string("bad integer for ") + what + ": \"" + tok +
                     "\"");
  }
  return v;
}

long read_int(std::istream& in, const char* what) {
  return parse_int(next_token(in, what), what);
}

double read_double(std::istream& in, const char* what) {
  std::string tok = next_token(in, what);
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw ParseError(std::string("bad float for ") + what + ": \"" + tok +
                     "\"");
  }
  if (!std::isfinite(v)) {
    throw ParseError(std::string("non-finite value for ") + what);
  }
  return v;
}

}  // namespace

std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

int metric_component_slot(const std::string& name) {
  for (int c = 0; c < 6; ++c) {
    if (name == kMetricComponentNames[c]) return c;
  }
  throw ParseError("unknown metric component \"" + name + "\"");
}

std::vector<BlockSummary> summarize_metric(const BulkMetric& bm) {
  std::vector<BlockSummary> out;
  for (int k = bm.g.floor(); k <= bm.g.stored_top(); ++k) {
    const SymForm& coeff = bm.g.stored(k);
    for (int c = 0; c < 6; ++c) {
      BlockSummary s;
      s.order = k;
      s.component = kMetricComponentNames[c];
      s.sup = coeff.c[static_cast<std::size_t>(c)].sup_norm();
      for (const auto& mode : kSummaryModes) {
        s.modes.push_back(
            mode_projection(coeff.c[static_cast<std::size_t>(c)], mode));
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

void write_coefficients(std::ostream& out, const BulkMetric& bm) {
  const GridSpec& grid = bm.grid();
  out << kCoeffMagic << "\n";
  out << "eps " << bm.eps << "\n";
  out << "grid " << grid.n << "\n";
  out << "floor " << bm.g.floor() << "\n";
  out << "stored " << (bm.g.stored_top() - bm.g.floor() + 1) << "\n";
  if (bm.g.trusted_ceil() >= kExactCeil) {
    out << "trusted exact\n";
  } else {
    out << "trusted " << bm.g.trusted_ceil() << "\n";
  }
  for (int k = bm.g.floor(); k <= bm.g.stored_top(); ++k) {
    const SymForm& coeff = bm.g.stored(k);
    for (int c = 0; c < 6; ++c) {
      const ScalarField& f = coeff.c[static_cast<std::size_t>(c)];
      out << "block order " << k << " component " << kMetricComponentNames[c]
          << "\n";
      out << "sup " << hex_double(f.sup_norm()) << "\n";
      for (const auto& mode : kSummaryModes) {
        ModeSample m = mode_projection(f, mode);
        out << "mode " << mode[0] << " " << mode[1] << " " << mode[2] << " "
            << hex_double(m.amp_cos) << " " << hex_double(m.amp_sin) << "\n";
      }
      out << "data " << f.size() << "\n";
      for (std::size_t i = 0; i < f.size(); ++i) {
        out << hex_double(f[i]) << ((i % 8 == 7) ? "\n" : " ");
      }
      if (f.size() % 8 != 0) out << "\n";
    }
  }
  out << "end " << kCoeffMagic << "\n";
}

void write_coefficient_file(const std::string& path, const BulkMetric& bm) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_coefficients(out, bm);
  out.flush();
  if (!out) throw Error("write to " + path + " failed");
}

BulkMetric read_coefficients(std::istream& in) {
  expect_token(in, kCoeffMagic);
  expect_token(in, "eps");
  long eps = read_int(in, "eps");
  if (eps != 1 && eps != -1) {
    throw ParseError("eps must be 1 or -1, got " + std::to_string(eps));
  }
  expect_token(in, "grid");
  long n = read_int(in, "grid");
  if (n < 8 || n > 4096 || (n & (n - 1)) != 0) {
    throw ParseError("grid size must be a power of two in [8, 4096], got " +
                     std::to_string(n));
  }
  GridSpec grid = GridSpec::make(static_cast<int>(n));
  expect_token(in, "floor");
  long floor = read_int(in, "floor");
  expect_token(in, "stored");
  long stored = read_int(in, "stored");
  if (stored < 1 || stored > 256) {
    throw ParseError("stored order count out of range: " +
                     std::to_string(stored));
  }
  expect_token(in, "trusted");
  std::string ceil_tok = next_token(in, "trusted ceiling");
  long ceil =
      (ceil_tok == "exact") ? kExactCeil : parse_int(ceil_tok, "trusted");
  if (ceil < floor + stored - 1) {
    throw ParseError("trusted ceiling " + std::to_string(ceil) +
                     " is below the last stored order " +
                     std::to_string(floor + stored - 1));
  }

  Series<SymForm> g(SymForm(grid), static_cast<int>(floor),
                    static_cast<int>(stored), static_cast<int>(ceil));
  for (long k = floor; k < floor + stored; ++k) {
    for (int c = 0; c < 6; ++c) {
      expect_token(in, "block");
      expect_token(in, "order");
      long got_k = read_int(in, "block order");
      if (got_k != k) {
        throw ParseError("expected block order " + std::to_string(k) +
                         ", found " + std::to_string(got_k));
      }
      expect_token(in, "component");
      std::string comp = next_token(in, "component name");
      if (metric_component_slot(comp) != c) {
        throw ParseError("expected component " +
                         std::string(kMetricComponentNames[c]) + ", found " + comp);
      }
      expect_token(in, "sup");
      double sup = read_double(in, "sup");
      for (const auto& mode : kSummaryModes) {
        expect_token(in, "mode");
        for (int d = 0; d < 3; ++d) {
          long got = read_int(in, "mode wavevector");
          if (got != mode[d]) {
            throw ParseError("unexpected summary wavevector entry " +
                             std::to_string(got));
          }
        }
        read_double(in, "mode cosine amplitude");
        read_double(in, "mode sine amplitude");
      }
      expect_token(in, "data");
      long count = read_int(in, "data count");
      if (count != static_cast<long>(grid.points())) {
        throw ParseError("data count " + std::to_string(count) +
                         " does not match grid with " +
                         std::to_string(grid.points()) + " points");
      }
      ScalarField& f =
          g.stored_mut(static_cast<int>(k)).c[static_cast<std::size_t>(c)];
      for (long i = 0; i < count; ++i) {
        f[static_cast<std::size_t>(i)] = read_double(in, "coefficient value");
      }
      if (f.sup_norm() != sup) {
        throw ParseError("stored sup norm does not match data for order " +
                         std::to_string(k) + " component " + comp);
      }
    }
  }
  expect_token(in, "end");
  expect_token(in, kCoeffMagic);
  std::string trailing;
  if (in >> trailing) {
    throw ParseError("trailing content after end marker: \"" + trailing +
                     "\"");
  }
  return make_bulk_metric(static_cast<int>(eps), std::move(g));
}

BulkMetric read_coefficient_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open coefficient file " + path);
  return read_coefficients(in);
}

}  // namespace fgforge
