#include "panosr/autograd/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace panosr::ag {

namespace {

constexpr char kMagic[8] = {'P', 'S', 'R', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamStore& store,
                     const std::map<std::string, std::string>& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out.write(kMagic, sizeof(kMagic));

  nlohmann::ordered_json j;
  for (const auto& [k, v] : meta) j[k] = v;
  const std::string meta_str = j.dump();
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(meta_str.size()));
  out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));

  write_pod<std::uint64_t>(out, store.all().size());
  for (const auto& p : store.all()) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    const auto& t = p.var->value;
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) write_pod<std::int64_t>(out, d);
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(sizeof(double) * t.numel()));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

namespace {

CheckpointMeta load_impl(const std::string& path, ParamStore* store) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);

  const auto meta_len = read_pod<std::uint32_t>(in);
  std::string meta_str(meta_len, '\0');
  in.read(meta_str.data(), meta_len);
  CheckpointMeta meta;
  const auto parsed = nlohmann::json::parse(meta_str);
  if (parsed.is_object())
    for (const auto& [k, v] : parsed.items())
      meta.entries[k] = v.get<std::string>();

  const auto count = read_pod<std::uint64_t>(in);
  std::size_t matched = 0;
  for (std::uint64_t e = 0; e < count; ++e) {
    const auto name_len = read_pod<std::uint32_t>(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const auto ndim = read_pod<std::uint32_t>(in);
    std::vector<std::int64_t> dims(ndim);
    for (auto& d : dims) d = read_pod<std::int64_t>(in);
    Tensor t(dims);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(sizeof(double) * t.numel()));
    if (!in) throw std::runtime_error("checkpoint: truncated tensor " + name);
    if (store) {
      if (!store->contains(name))
        throw std::runtime_error("checkpoint: unexpected parameter " + name);
      Var var = store->find(name);
      if (var->value.shape() != t.shape())
        throw std::runtime_error("checkpoint: shape mismatch for " + name +
                                 " (" + var->value.shape_str() + " vs " +
                                 t.shape_str() + ")");
      var->value = std::move(t);
      ++matched;
    }
  }
  if (store && matched != store->all().size())
    throw std::runtime_error(
        "checkpoint: archive is missing parameters for this model");
  return meta;
}

}  // namespace

CheckpointMeta load_checkpoint(const std::string& path, ParamStore& store) {
  return load_impl(path, &store);
}

CheckpointMeta read_checkpoint_meta(const std::string& path) {
  return load_impl(path, nullptr);
}

}  // namespace panosr::ag
