#include "alq/mat.hpp"

namespace alq {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Weight: return "weight";
    case ErrorKind::Controllability: return "controllability";
    case ErrorKind::Step: return "step";
    case ErrorKind::Window: return "window";
    case ErrorKind::Trace: return "trace";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::Instability: return "instability";
    case ErrorKind::Numeric: return "numeric";
  }
  return "unknown";
}

int Error::exit_code() const {
  switch (kind_) {
    case ErrorKind::Overflow:
    case ErrorKind::Singularity:
    case ErrorKind::Instability:
    case ErrorKind::Numeric:
      return 2;
    default:
      return 1;
  }
}

void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, std::string(to_string(kind)) + " error: " + msg);
}

Mat vstack(const Mat& top, const Mat& bottom) {
  if (top.empty()) return bottom;
  if (bottom.empty()) return top;
  if (top.cols() != bottom.cols()) fail(ErrorKind::Dimension, "vstack " + top.shape() + " / " + bottom.shape());
  Mat m(top.rows() + bottom.rows(), top.cols());
  m.set_block(0, 0, top);
  m.set_block(top.rows(), 0, bottom);
  return m;
}

Mat hstack(const Mat& left, const Mat& right) {
  if (left.empty()) return right;
  if (right.empty()) return left;
  if (left.rows() != right.rows()) fail(ErrorKind::Dimension, "hstack " + left.shape() + " | " + right.shape());
  Mat m(left.rows(), left.cols() + right.cols());
  m.set_block(0, 0, left);
  m.set_block(0, left.cols(), right);
  return m;
}

void require_finite(const Mat& m, const std::string& what) {
  if (!m.all_finite()) fail(ErrorKind::Overflow, "non-finite value in " + what);
}

}  // namespace alq
