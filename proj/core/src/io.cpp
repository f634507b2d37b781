#include "tryon/core/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tryon {

namespace {

void must_write(std::ofstream& out, const std::string& path) {
  if (!out) throw IoError("write failed: " + path);
}

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

std::uint8_t quantize8(float v) {
  v = std::min(std::max(v, 0.0f), 1.0f);
  return static_cast<std::uint8_t>(std::lround(v * 255.0f));
}

}  // namespace

void write_field(const Raster& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  out.write("TFLD", 4);
  put(out, static_cast<std::int32_t>(r.height));
  put(out, static_cast<std::int32_t>(r.width));
  put(out, static_cast<std::int32_t>(r.channels));
  out.write(reinterpret_cast<const char*>(r.data.data()),
            static_cast<std::streamsize>(r.data.size() * sizeof(float)));
  must_write(out, path);
}

Raster read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for read: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "TFLD", 4) != 0) throw IoError("bad field magic: " + path);
  const int h = get<std::int32_t>(in);
  const int w = get<std::int32_t>(in);
  const int c = get<std::int32_t>(in);
  Raster r(h, w, c);
  in.read(reinterpret_cast<char*>(r.data.data()),
          static_cast<std::streamsize>(r.data.size() * sizeof(float)));
  if (!in) throw IoError("truncated field file: " + path);
  return r;
}

void write_ppm(const Raster& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  out << "P6\n" << r.width << " " << r.height << "\n255\n";
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      for (int c = 0; c < 3; ++c) {
        const float v = c < r.channels ? r.at(y, x, c) : r.at(y, x, r.channels - 1);
        const std::uint8_t q = quantize8(v);
        out.write(reinterpret_cast<const char*>(&q), 1);
      }
  must_write(out, path);
}

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for read: " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || maxval != 255) throw IoError("unsupported PPM: " + path);
  in.get();  // single whitespace after header
  Image im(h, w);
  std::vector<std::uint8_t> row(static_cast<size_t>(w) * 3);
  for (int y = 0; y < h; ++y) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        im.at(y, x, c) = static_cast<float>(row[x * 3 + c]) / 255.0f;
  }
  if (!in) throw IoError("truncated PPM: " + path);
  return im;
}

void write_obj(const TexturedMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  out << "# tryon3d mesh: " << mesh.vertices.size() << " vertices, "
      << mesh.triangles.size() << " triangles\n";
  const bool colors = mesh.has_colors();
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& v = mesh.vertices[i];
    out << "v " << v.x << " " << v.y << " " << v.z;
    if (colors) {
      const auto& c = mesh.vertex_colors[i];
      out << " " << c.x << " " << c.y << " " << c.z;
    }
    out << "\n";
  }
  for (const auto& t : mesh.triangles)
    out << "f " << t.a + 1 << " " << t.b + 1 << " " << t.c + 1 << "\n";
  must_write(out, path);
}

void write_ply(const TexturedMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  const bool colors = mesh.has_colors();
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.vertices.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n";
  if (colors)
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element face " << mesh.triangles.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& v = mesh.vertices[i];
    put(out, v.x); put(out, v.y); put(out, v.z);
    if (colors) {
      const auto& c = mesh.vertex_colors[i];
      const std::uint8_t rgb[3] = {quantize8(c.x), quantize8(c.y), quantize8(c.z)};
      out.write(reinterpret_cast<const char*>(rgb), 3);
    }
  }
  for (const auto& t : mesh.triangles) {
    const std::uint8_t n = 3;
    put(out, n);
    put(out, static_cast<std::int32_t>(t.a));
    put(out, static_cast<std::int32_t>(t.b));
    put(out, static_cast<std::int32_t>(t.c));
  }
  must_write(out, path);
}

TexturedMesh read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for read: " + path);
  std::string line;
  size_t n_vertices = 0, n_faces = 0;
  bool colors = false;
  std::getline(in, line);
  if (line != "ply") throw IoError("bad PLY magic: " + path);
  while (std::getline(in, line) && line != "end_header") {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "element") {
      std::string what;
      size_t count;
      ls >> what >> count;
      if (what == "vertex") n_vertices = count;
      if (what == "face") n_faces = count;
    } else if (tok == "property") {
      std::string type, name;
      ls >> type >> name;
      if (name == "red") colors = true;
    }
  }
  TexturedMesh mesh;
  mesh.vertices.resize(n_vertices);
  if (colors) mesh.vertex_colors.resize(n_vertices);
  for (size_t i = 0; i < n_vertices; ++i) {
    auto& v = mesh.vertices[i];
    v.x = get<float>(in); v.y = get<float>(in); v.z = get<float>(in);
    if (colors) {
      std::uint8_t rgb[3];
      in.read(reinterpret_cast<char*>(rgb), 3);
      mesh.vertex_colors[i] = {rgb[0] / 255.0f, rgb[1] / 255.0f, rgb[2] / 255.0f};
    }
  }
  mesh.triangles.resize(n_faces);
  for (size_t i = 0; i < n_faces; ++i) {
    const auto n = get<std::uint8_t>(in);
    if (n != 3) throw IoError("non-triangle face in PLY: " + path);
    auto& t = mesh.triangles[i];
    t.a = static_cast<std::uint32_t>(get<std::int32_t>(in));
    t.b = static_cast<std::uint32_t>(get<std::int32_t>(in));
    t.c = static_cast<std::uint32_t>(get<std::int32_t>(in));
  }
  if (!in) throw IoError("truncated PLY: " + path);
  return mesh;
}

void write_volume(const OccupancyGrid& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  out << "VOLF32\n"
      << g.nx << " " << g.ny << " " << g.nz << "\n"
      << g.bbox_lo.x << " " << g.bbox_lo.y << " " << g.bbox_lo.z << " "
      << g.bbox_hi.x << " " << g.bbox_hi.y << " " << g.bbox_hi.z << "\n";
  out.write(reinterpret_cast<const char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(float)));
  must_write(out, path);
}

OccupancyGrid read_volume(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for read: " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != "VOLF32") throw IoError("bad volume magic: " + path);
  OccupancyGrid g;
  in >> g.nx >> g.ny >> g.nz;
  in >> g.bbox_lo.x >> g.bbox_lo.y >> g.bbox_lo.z;
  in >> g.bbox_hi.x >> g.bbox_hi.y >> g.bbox_hi.z;
  in.get();
  g.values.resize(static_cast<size_t>(g.nx) * g.ny * g.nz);
  in.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(g.values.size() * sizeof(float)));
  if (!in) throw IoError("truncated volume: " + path);
  return g;
}

}  // namespace tryon
