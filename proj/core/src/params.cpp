#include "selar/params.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "selar/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are little-endian");

namespace selar {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'L', 'A', 'R', 'C', 'K', 'P'};
constexpr uint32_t kVersion = 1;

template <class T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T read_pod(std::istream& is, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw Error::data(std::string("checkpoint: truncated while reading ") + what);
  return v;
}

}  // namespace

void ParamStore::set(const std::string& name, Tensor t) {
  if (name.empty()) throw Error::contract("param store: empty name");
  items_[name] = std::move(t);
}

Tensor& ParamStore::at(const std::string& name) {
  auto it = items_.find(name);
  if (it == items_.end()) throw Error::contract("param store: no parameter named " + name);
  return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = items_.find(name);
  if (it == items_.end()) throw Error::contract("param store: no parameter named " + name);
  return it->second;
}

int64_t ParamStore::total_scalars() const {
  int64_t n = 0;
  for (const auto& [name, t] : items_) n += t.numel();
  return n;
}

void ParamStore::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error::data("checkpoint: cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  write_pod<uint32_t>(os, kVersion);
  write_pod<uint32_t>(os, static_cast<uint32_t>(items_.size()));
  for (const auto& [name, t] : items_) {
    write_pod<uint32_t>(os, static_cast<uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod<uint32_t>(os, static_cast<uint32_t>(t.rank()));
    for (int64_t d : t.shape()) write_pod<uint64_t>(os, static_cast<uint64_t>(d));
    os.write(reinterpret_cast<const char*>(t.data()),
             static_cast<std::streamsize>(t.numel() * sizeof(double)));
  }
  if (!os) throw Error::data("checkpoint: write to " + path + " failed");
}

ParamStore ParamStore::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error::data("checkpoint: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error::data("checkpoint: bad magic in " + path);
  }
  const uint32_t version = read_pod<uint32_t>(is, "version");
  if (version != kVersion) {
    throw Error::data("checkpoint: unsupported version " + std::to_string(version));
  }
  const uint32_t count = read_pod<uint32_t>(is, "entry count");
  ParamStore store;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = read_pod<uint32_t>(is, "name length");
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw Error::data("checkpoint: truncated name");
    const uint32_t rank = read_pod<uint32_t>(is, "rank");
    if (rank > 8) throw Error::data("checkpoint: implausible rank");
    std::vector<int64_t> shape(rank);
    int64_t numel = 1;
    for (uint32_t d = 0; d < rank; ++d) {
      shape[d] = static_cast<int64_t>(read_pod<uint64_t>(is, "dimension"));
      if (shape[d] < 0 || shape[d] > (1ll << 32)) {
        throw Error::data("checkpoint: implausible dimension");
      }
      numel *= shape[d];
    }
    std::vector<double> data(static_cast<size_t>(numel));
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!is) throw Error::data("checkpoint: truncated payload for " + name);
    store.set(name, Tensor(std::move(shape), std::move(data)));
  }
  return store;
}

VarMap bind_params(Tape& t, const ParamStore& store, bool requires_grad) {
  VarMap m;
  for (const auto& [name, tensor] : store) {
    m.emplace(name, t.leaf(tensor, requires_grad));
  }
  return m;
}

std::vector<Var> vars_in_order(const VarMap& m) {
  std::vector<Var> out;
  out.reserve(m.size());
  for (const auto& [name, v] : m) out.push_back(v);
  return out;
}

std::map<std::string, Tensor> grads_by_name(Tape& t, Var loss, const VarMap& params,
                                            bool nested, bool retain) {
  std::vector<Var> vars = vars_in_order(params);
  GradOptions opt{.retain_graph = retain};
  std::vector<Var> grads =
      nested ? t.nested_gradient(loss, vars, opt) : t.gradient(loss, vars, opt);
  std::map<std::string, Tensor> out;
  size_t i = 0;
  for (const auto& [name, v] : params) out.emplace(name, grads[i++].value());
  return out;
}

void sgd_step(ParamStore& store, const std::map<std::string, Tensor>& grads, double lr) {
  for (const auto& [name, g] : grads) {
    Tensor& p = store.at(name);
    if (!p.same_shape(g)) throw Error::shape("sgd_step: gradient shape mismatch for " + name);
    for (int64_t i = 0; i < p.numel(); ++i) p.at(i) -= lr * g.at(i);
  }
}

}  // namespace selar
