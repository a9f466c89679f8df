#include "onebit/problem_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace onebit {

namespace {

constexpr char kMagic[5] = {'O', 'B', 'I', 'T', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint8_t kTagOperator = 1;
constexpr std::uint8_t kTagTruth = 2;
constexpr std::uint8_t kTagObservation = 3;

static_assert(std::endian::native == std::endian::little,
              "OBIT1 writer assumes a little-endian host");

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open for writing: " + path);
  }
  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void put_bytes(const void* p, size_t n) { out_.write(static_cast<const char*>(p), n); }
  void finish(const std::string& path) {
    out_.flush();
    if (!out_) throw IoError("short write: " + path);
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open for reading: " + path);
  }
  template <typename T>
  T get(const char* what) {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in_) throw ParseError(std::string("truncated ") + what, offset_);
    offset_ += sizeof v;
    return v;
  }
  void get_bytes(void* p, size_t n, const char* what) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw ParseError(std::string("truncated ") + what, offset_);
    offset_ += n;
  }
  bool at_eof() {
    in_.peek();
    return in_.eof();
  }
  std::uint64_t offset() const { return offset_; }

 private:
  std::ifstream in_;
  std::uint64_t offset_ = 0;
};

}  // namespace

void save_problem(const std::string& path, const ProblemInstance& problem) {
  Writer w(path);
  w.put_bytes(kMagic, sizeof kMagic);
  w.put<std::uint16_t>(kVersion);

  const LinearOperator& op = problem.op;
  w.put<std::uint8_t>(kTagOperator);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(op.kind()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(op.rows()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(op.cols()));
  if (op.kind() == OperatorKind::DenseGaussian) {
    // Eigen default storage is column-major; emit row-major explicitly
    for (int i = 0; i < op.rows(); ++i)
      for (int j = 0; j < op.cols(); ++j) w.put<double>(op.matrix()(i, j));
  } else {
    w.put_bytes(op.indices().data(), sizeof(std::uint32_t) * op.indices().size());
    w.put<double>(op.scale());
  }

  if (problem.truth) {
    if (problem.truth->values.size() != op.cols())
      throw std::invalid_argument("save_problem: truth length does not match operator");
    w.put<std::uint8_t>(kTagTruth);
    w.put_bytes(problem.truth->values.data(), sizeof(double) * problem.truth->values.size());
  }

  if (problem.observation) {
    const OneBitObservation& obs = *problem.observation;
    if (obs.bits.size() != op.rows())
      throw std::invalid_argument("save_problem: observation length does not match operator");
    w.put<std::uint8_t>(kTagObservation);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(obs.model));
    w.put<double>(obs.sigma);
    for (long i = 0; i < obs.bits.size(); ++i)
      w.put<std::int8_t>(static_cast<std::int8_t>(obs.bits[i]));
  }
  w.finish(path);
}

ProblemInstance load_problem(const std::string& path) {
  Reader r(path);
  char magic[5];
  r.get_bytes(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw ParseError("bad magic", 0);
  const auto version = r.get<std::uint16_t>("version");
  if (version != kVersion)
    throw ParseError("unsupported format version " + std::to_string(version), 5);

  ProblemInstance problem;
  bool have_op = false;
  while (!r.at_eof()) {
    const auto tag = r.get<std::uint8_t>("section tag");
    if (tag == kTagOperator) {
      const auto kind = r.get<std::uint8_t>("operator kind");
      const auto m = r.get<std::uint32_t>("operator rows");
      const auto n = r.get<std::uint32_t>("operator cols");
      if (m == 0 || n == 0) throw ParseError("zero operator dimension", r.offset());
      if (kind == static_cast<std::uint8_t>(OperatorKind::DenseGaussian)) {
        Mat a(m, n);
        for (std::uint32_t i = 0; i < m; ++i)
          for (std::uint32_t j = 0; j < n; ++j) a(i, j) = r.get<double>("matrix entry");
        problem.op = LinearOperator::dense(std::move(a));
      } else if (kind == static_cast<std::uint8_t>(OperatorKind::PixelMask)) {
        std::vector<std::uint32_t> idx(m);
        r.get_bytes(idx.data(), sizeof(std::uint32_t) * m, "mask indices");
        const double scale = r.get<double>("mask scale");
        problem.op = LinearOperator::mask(std::move(idx), static_cast<int>(n), scale);
      } else {
        throw ParseError("unknown operator kind " + std::to_string(kind), r.offset());
      }
      have_op = true;
    } else if (tag == kTagTruth) {
      if (!have_op) throw ParseError("TRUTH section before OPERATOR", r.offset());
      Vec t(problem.op.cols());
      r.get_bytes(t.data(), sizeof(double) * t.size(), "truth values");
      problem.truth = SignalVector(std::move(t));
    } else if (tag == kTagObservation) {
      if (!have_op) throw ParseError("OBSERVATION section before OPERATOR", r.offset());
      OneBitObservation obs;
      const auto model = r.get<std::uint8_t>("observation model");
      if (model > 1) throw ParseError("unknown observation model", r.offset());
      obs.model = static_cast<MeasurementModel>(model);
      obs.sigma = r.get<double>("observation sigma");
      if (!(obs.sigma >= 0.0)) throw ParseError("negative observation sigma", r.offset());
      obs.bits.resize(problem.op.rows());
      for (int i = 0; i < problem.op.rows(); ++i) {
        const auto b = r.get<std::int8_t>("observation bit");
        if (b != 1 && b != -1) throw ParseError("bit value must be -1 or +1", r.offset());
        obs.bits[i] = b;
      }
      obs.operator_id = problem.op.fingerprint();
      problem.observation = std::move(obs);
    } else {
      throw ParseError("unknown section tag " + std::to_string(tag), r.offset());
    }
  }
  if (!have_op) throw ParseError("file has no OPERATOR section", r.offset());
  return problem;
}

void write_vector_csv(const std::string& path, const Vec& v) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.precision(17);
  for (long i = 0; i < v.size(); ++i) out << v[i] << '\n';
  if (!out) throw IoError("short write: " + path);
}

Vec read_vector_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::vector<double> vals;
  double x;
  while (in >> x) vals.push_back(x);
  if (!in.eof()) throw IoError("non-numeric content in " + path);
  Vec v(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<long>(i)] = vals[i];
  return v;
}

}  // namespace onebit
