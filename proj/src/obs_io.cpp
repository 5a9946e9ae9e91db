#include "epi/obs_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace epi {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

long long parse_count(const std::string& cell, const std::string& file,
                      int row) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(cell, &pos);
  } catch (const std::exception&) {
    throw IoError(file + " row " + std::to_string(row) +
                  ": not an integer count: '" + cell + "'");
  }
  if (pos != cell.size())
    throw IoError(file + " row " + std::to_string(row) +
                  ": trailing characters in '" + cell + "'");
  if (v < 0)
    throw IoError(file + " row " + std::to_string(row) + ": negative count " +
                  std::to_string(v));
  return v;
}

struct CsvReader {
  std::string file;
  std::ifstream in;
  int row = 0;

  explicit CsvReader(const std::string& path) : file(path), in(path) {
    if (!in) throw IoError("cannot open " + path);
  }

  bool next(std::vector<std::string>& cells) {
    std::string line;
    while (std::getline(in, line)) {
      ++row;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      cells = split_csv(line);
      return true;
    }
    return false;
  }
};

void expect_header(CsvReader& reader, const std::string& expected) {
  std::vector<std::string> cells;
  if (!reader.next(cells))
    throw IoError(reader.file + ": empty file, expected header " + expected);
  std::string got;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) got += ',';
    got += cells[i];
  }
  if (got != expected)
    throw IoError(reader.file + ": header '" + got + "' (expected '" +
                  expected + "')");
}

}  // namespace

ObservationSet load_observations(const ObservationPaths& paths,
                                 const Calendar& cal) {
  ObservationSet obs;
  {
    CsvReader reader(paths.weekly);
    expect_header(reader, "week,y_h,y_ic");
    std::vector<std::string> cells;
    int expected_week = 0;
    while (reader.next(cells)) {
      if (cells.size() != 3)
        throw IoError(reader.file + " row " + std::to_string(reader.row) +
                      ": expected 3 columns");
      const long long week = parse_count(cells[0], reader.file, reader.row);
      if (week != expected_week)
        throw IoError(reader.file + " row " + std::to_string(reader.row) +
                      ": week " + std::to_string(week) + ", expected " +
                      std::to_string(expected_week));
      obs.y_h.push_back(parse_count(cells[1], reader.file, reader.row));
      obs.y_ic.push_back(parse_count(cells[2], reader.file, reader.row));
      ++expected_week;
    }
  }
  if (!paths.gp.empty()) {
    CsvReader reader(paths.gp);
    expect_header(reader, "day,y_g");
    std::vector<std::string> cells;
    std::vector<long long> y_g;
    int expected_day = 0;
    while (reader.next(cells)) {
      if (cells.size() != 2)
        throw IoError(reader.file + " row " + std::to_string(reader.row) +
                      ": expected 2 columns");
      const long long day = parse_count(cells[0], reader.file, reader.row);
      if (day != expected_day)
        throw IoError(reader.file + " row " + std::to_string(reader.row) +
                      ": day " + std::to_string(day) + ", expected " +
                      std::to_string(expected_day));
      y_g.push_back(parse_count(cells[1], reader.file, reader.row));
      ++expected_day;
    }
    obs.y_g = std::move(y_g);
  }
  if (!paths.virology.empty()) {
    CsvReader reader(paths.virology);
    expect_header(reader, "week,tested,positive");
    std::vector<std::string> cells;
    while (reader.next(cells)) {
      if (cells.size() != 3)
        throw IoError(reader.file + " row " + std::to_string(reader.row) +
                      ": expected 3 columns");
      VirologyRecord rec;
      rec.week =
          static_cast<int>(parse_count(cells[0], reader.file, reader.row));
      rec.tested = parse_count(cells[1], reader.file, reader.row);
      rec.positive = parse_count(cells[2], reader.file, reader.row);
      if (rec.positive > rec.tested)
        throw IoError(reader.file + " row " + std::to_string(reader.row) +
                      ": positive " + std::to_string(rec.positive) +
                      " > tested " + std::to_string(rec.tested));
      obs.virology.push_back(rec);
    }
  }
  try {
    obs.validate(cal);
  } catch (const std::invalid_argument& err) {
    throw IoError(err.what());
  }
  return obs;
}

void save_observations(const ObservationSet& obs, const Calendar& cal,
                       const ObservationPaths& paths) {
  {
    std::ofstream out(paths.weekly);
    if (!out) throw IoError("cannot open " + paths.weekly);
    out << "week,y_h,y_ic\n";
    for (int t = 0; t < cal.n_weeks(); ++t)
      out << t << ',' << obs.y_h[t] << ',' << obs.y_ic[t] << '\n';
  }
  if (!paths.gp.empty() && obs.y_g) {
    std::ofstream out(paths.gp);
    if (!out) throw IoError("cannot open " + paths.gp);
    out << "day,y_g\n";
    for (int u = 0; u < cal.n_days(); ++u)
      out << u << ',' << (*obs.y_g)[u] << '\n';
  }
  if (!paths.virology.empty() && !obs.virology.empty()) {
    std::ofstream out(paths.virology);
    if (!out) throw IoError("cannot open " + paths.virology);
    out << "week,tested,positive\n";
    for (const auto& rec : obs.virology)
      out << rec.week << ',' << rec.tested << ',' << rec.positive << '\n';
  }
}

void save_xi_csv(const InfectionSeries& xi, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "day,xi0\n";
  char buf[64];
  for (std::size_t u = 0; u < xi.xi0.size(); ++u) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", u, xi.xi0[u]);
    out << buf;
  }
}

void save_latent_csv(const LatentPath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open " + file);
  out << "day,x0h,xh,xh_ic_cohort,xic,x0f,xf\n";
  for (std::size_t u = 0; u < path.xh.size(); ++u) {
    out << u << ',' << path.x0h[u] << ',' << path.xh[u] << ','
        << path.xh_ic_cohort[u] << ',' << path.xic[u] << ',' << path.x0f[u]
        << ',' << path.xf[u] << '\n';
  }
}

}  // namespace epi
