#include "qsopt/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "qsopt/error.hpp"

namespace qsopt {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'Q', 'S', 'O', 'P', 'T', 'C', 'K', 'P'};

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <class T>
  void put(T v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void put_floats(const std::vector<float>& v) {
    os_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(float)));
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(std::istream& is, const std::filesystem::path& path) : is_(is), path_(path) {}
  template <class T>
  T get() {
    T v{};
    is_.read(reinterpret_cast<char*>(&v), sizeof v);
    check();
    return v;
  }
  std::vector<float> get_floats(std::uint64_t n) {
    std::vector<float> v(n);
    is_.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(float)));
    check();
    return v;
  }

 private:
  void check() {
    if (!is_) throw Error("checkpoint " + path_.string() + " is truncated");
  }
  std::istream& is_;
  const std::filesystem::path& path_;
};

std::vector<float> to_vector(const Net::Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

Checkpoint make_checkpoint(const Agent& agent) {
  return {agent.config(), agent.main().shape(), to_vector(agent.main().parameters()),
          to_vector(agent.target().parameters())};
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write checkpoint " + path.string());
  Writer w(os);
  os.write(kMagic, sizeof kMagic);
  w.put(kCheckpointVersion);
  const QNetShape& s = ckpt.shape;
  for (int v : {s.channels, s.rows, s.cols, s.aux, s.actions, s.conv1, s.conv2, s.hidden}) w.put<std::int32_t>(v);
  const AgentConfig& a = ckpt.agent;
  for (double v : {a.gamma, a.epsilon_start, a.epsilon_floor, a.epsilon_decay, a.learning_rate, a.lr_decay,
                   a.plateau_factor, a.entangling_weight, 0.0, 0.0}) {
    w.put(v);
  }
  w.put<std::uint64_t>(a.memory_size);
  w.put<std::uint64_t>(a.batch_size);
  for (int v : {a.plateau_patience, a.plateau_window, a.target_sync_every}) w.put<std::int32_t>(v);
  w.put<std::uint64_t>(ckpt.main.size());
  w.put_floats(ckpt.main);
  w.put_floats(ckpt.target);
  if (!os) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open checkpoint " + path.string());
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw Error(path.string() + " is not a checkpoint");
  Reader r(is, path);
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint c;
  QNetShape& s = c.shape;
  for (int* f : {&s.channels, &s.rows, &s.cols, &s.aux, &s.actions, &s.conv1, &s.conv2, &s.hidden}) {
    *f = r.get<std::int32_t>();
  }
  AgentConfig& a = c.agent;
  for (double* f : {&a.gamma, &a.epsilon_start, &a.epsilon_floor, &a.epsilon_decay, &a.learning_rate, &a.lr_decay,
                    &a.plateau_factor, &a.entangling_weight}) {
    *f = r.get<double>();
  }
  r.get<double>();
  r.get<double>();
  a.memory_size = r.get<std::uint64_t>();
  a.batch_size = r.get<std::uint64_t>();
  for (int* f : {&a.plateau_patience, &a.plateau_window, &a.target_sync_every}) *f = r.get<std::int32_t>();
  const auto count = r.get<std::uint64_t>();
  if (count != s.parameter_count()) throw Error("checkpoint parameter count does not match its network shape");
  c.main = r.get_floats(count);
  c.target = r.get_floats(count);
  return c;
}

Agent restore_agent(const Checkpoint& ckpt) {
  Agent agent(ckpt.agent, ckpt.shape, 0);
  agent.main().parameters() = Eigen::Map<const Net::Vector>(ckpt.main.data(), static_cast<Eigen::Index>(ckpt.main.size()));
  Net target(ckpt.shape, 0);
  target.parameters() =
      Eigen::Map<const Net::Vector>(ckpt.target.data(), static_cast<Eigen::Index>(ckpt.target.size()));
  agent.set_target(target);
  return agent;
}

}  // namespace qsopt
