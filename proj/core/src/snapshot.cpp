#include "magnls/snapshot.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian");

namespace magnls {

using json = nlohmann::ordered_json;

void write_snapshot(const std::filesystem::path& path, const ComplexField& u,
                    const SnapshotHeader& header) {
  json j;
  j["dim"] = header.dim;
  j["n"] = header.n;
  j["length"] = header.length;
  j["time"] = header.time;
  j["b"] = header.b;
  if (header.h)
    j["h"] = *header.h;
  if (header.rescaled_time)
    j["rescaled_time"] = *header.rescaled_time;

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot open snapshot file for writing: " + path.string());
  out << j.dump() << '\n';
  out.write(reinterpret_cast<const char*>(u.values().data()),
            static_cast<std::streamsize>(u.size() * sizeof(Complex)));
  if (!out)
    throw Error("snapshot write failed: " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const ComplexField& u,
                    double time, double b) {
  SnapshotHeader h;
  h.dim = u.grid().dim();
  h.n = u.grid().n();
  h.length = u.grid().length();
  h.time = time;
  h.b = b;
  write_snapshot(path, u, h);
}

std::pair<ComplexField, SnapshotHeader>
read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open snapshot file: " + path.string());
  std::string line;
  std::getline(in, line);
  json j = json::parse(line);

  SnapshotHeader header;
  header.dim = j.at("dim").get<int>();
  header.n = j.at("n").get<int>();
  header.length = j.at("length").get<double>();
  header.time = j.at("time").get<double>();
  header.b = j.at("b").get<double>();
  if (j.contains("h"))
    header.h = j["h"].get<double>();
  if (j.contains("rescaled_time"))
    header.rescaled_time = j["rescaled_time"].get<double>();

  Grid grid(header.dim, header.n, header.length);
  std::vector<Complex> values(grid.size());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(Complex)));
  if (!in)
    throw Error("snapshot payload truncated: " + path.string());
  return {ComplexField(grid, std::move(values)), header};
}

} // namespace magnls
