#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "qcdiff/diffusion.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace qcdiff {

namespace {

constexpr char kCkptMagic[4] = {'Q', 'D', 'N', 'M'};

void put_u16(std::ostream& out, std::uint16_t v) {
  out.write(reinterpret_cast<const char*>(&v), 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

void write_tensor(std::ostream& out, const std::string& name,
                  const std::vector<std::uint32_t>& dims, const float* data,
                  std::size_t size) {
  put_u16(out, static_cast<std::uint16_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  out.put(static_cast<char>(dims.size()));
  for (std::uint32_t d : dims) put_u32(out, d);
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(size * sizeof(float)));
}

struct Reader {
  std::ifstream in;
  std::string path;

  void read(char* dst, std::streamsize n) {
    in.read(dst, n);
    if (in.gcount() != n)
      throw CorruptCheckpoint(path + ": truncated checkpoint");
  }
  std::uint16_t u16() {
    std::uint16_t v;
    read(reinterpret_cast<char*>(&v), 2);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    read(reinterpret_cast<char*>(&v), 4);
    return v;
  }
  std::uint8_t u8() {
    char c;
    read(&c, 1);
    return static_cast<std::uint8_t>(c);
  }
  std::string str(std::size_t n) {
    std::string s(n, '\0');
    read(s.data(), static_cast<std::streamsize>(n));
    return s;
  }
};

}  // namespace

void save_checkpoint(const Denoiser<float>& params,
                     const AdamNetState<float>& opt,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  auto& mut_params = const_cast<Denoiser<float>&>(params);
  auto& mut_opt = const_cast<AdamNetState<float>&>(opt);
  auto pt = mut_params.tensors();
  auto mt = mut_opt.m.tensors();
  auto vt = mut_opt.v.tensors();

  out.write(kCkptMagic, 4);
  put_u16(out, 1);
  out.put(static_cast<char>(params.config.size()));
  out.write(params.config.data(),
            static_cast<std::streamsize>(params.config.size()));
  put_u16(out, static_cast<std::uint16_t>(3 * pt.size() + 2));
  for (const auto& t : pt) write_tensor(out, t.name, t.dims, t.data, t.size);
  for (const auto& t : mt)
    write_tensor(out, "opt.m." + t.name, t.dims, t.data, t.size);
  for (const auto& t : vt)
    write_tensor(out, "opt.v." + t.name, t.dims, t.data, t.size);
  const float step = static_cast<float>(opt.step_count);
  write_tensor(out, "opt.step", {1}, &step, 1);
  const float hyper[4] = {static_cast<float>(opt.hyper.learning_rate),
                          static_cast<float>(opt.hyper.beta1),
                          static_cast<float>(opt.hyper.beta2),
                          static_cast<float>(opt.hyper.epsilon)};
  write_tensor(out, "opt.hyper", {4}, hyper, 4);
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::string> expected_config) {
  Reader r{std::ifstream(path, std::ios::binary), path.string()};
  if (!r.in) throw IoError("cannot open " + path.string());

  char magic[4];
  r.read(magic, 4);
  if (std::memcmp(magic, kCkptMagic, 4) != 0)
    throw CorruptCheckpoint(path.string() + ": bad magic");
  if (const auto version = r.u16(); version != 1)
    throw CorruptCheckpoint(path.string() + ": unsupported version " +
                            std::to_string(version));
  const std::string config = r.str(r.u8());
  if (expected_config && config != *expected_config)
    throw CorruptCheckpoint(path.string() + ": checkpoint config '" + config +
                            "' does not match requested '" +
                            *expected_config + "'");

  Checkpoint ckpt;
  try {
    ckpt.params = Denoiser<float>::make(config);
  } catch (const InvalidRange&) {
    throw CorruptCheckpoint(path.string() + ": unknown config '" + config +
                            "'");
  }
  ckpt.opt = AdamNetState<float>::make(ckpt.params, AdamHyper{});

  auto pt = ckpt.params.tensors();
  auto mt = ckpt.opt.m.tensors();
  auto vt = ckpt.opt.v.tensors();
  auto find = [&](const std::string& name) -> TensorRef<float>* {
    for (auto& t : pt)
      if (t.name == name) return &t;
    for (auto& t : mt)
      if ("opt.m." + t.name == name) return &t;
    for (auto& t : vt)
      if ("opt.v." + t.name == name) return &t;
    return nullptr;
  };

  const int count = r.u16();
  float step = 0;
  float hyper[4] = {0, 0, 0, 0};
  bool saw_step = false, saw_hyper = false;
  std::size_t matched = 0;
  for (int i = 0; i < count; ++i) {
    const std::string name = r.str(r.u16());
    const int rank = r.u8();
    std::vector<std::uint32_t> dims(rank);
    std::size_t size = 1;
    for (int d = 0; d < rank; ++d) {
      dims[d] = r.u32();
      size *= dims[d];
    }
    if (name == "opt.step") {
      if (size != 1)
        throw CorruptCheckpoint(path.string() + ": malformed opt.step");
      r.read(reinterpret_cast<char*>(&step), sizeof(float));
      saw_step = true;
      continue;
    }
    if (name == "opt.hyper") {
      if (size != 4)
        throw CorruptCheckpoint(path.string() + ": malformed opt.hyper");
      r.read(reinterpret_cast<char*>(hyper), 4 * sizeof(float));
      saw_hyper = true;
      continue;
    }
    TensorRef<float>* ref = find(name);
    if (!ref)
      throw CorruptCheckpoint(path.string() + ": unexpected tensor '" + name +
                              "'");
    if (ref->dims != dims)
      throw CorruptCheckpoint(path.string() + ": tensor '" + name +
                              "' has the wrong shape");
    r.read(reinterpret_cast<char*>(ref->data),
           static_cast<std::streamsize>(size * sizeof(float)));
    ++matched;
  }
  if (!saw_step || !saw_hyper || matched != 3 * pt.size())
    throw CorruptCheckpoint(path.string() +
                            ": incomplete tensor manifest");
  ckpt.opt.step_count = static_cast<long>(step);
  ckpt.opt.hyper =
      AdamHyper{hyper[0], hyper[1], hyper[2], hyper[3]};
  return ckpt;
}

void write_loss_csv(const std::vector<double>& trace,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "step,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, trace[i]);
    out << buf;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace qcdiff
