#include "botsift/io.hpp"

#include <zlib.h>

#include <array>
#include <fstream>
#include <streambuf>

#include "botsift/error.hpp"

namespace botsift {

namespace {

class GzipStreambuf : public std::streambuf {
 public:
  explicit GzipStreambuf(const std::filesystem::path& path) : file_(gzopen(path.c_str(), "rb")) {
    if (file_ == nullptr) throw IoError("cannot open " + path.string());
    gzbuffer(file_, 1 << 17);
  }
  ~GzipStreambuf() override { gzclose(file_); }

  GzipStreambuf(const GzipStreambuf&) = delete;
  GzipStreambuf& operator=(const GzipStreambuf&) = delete;

 protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    const int n = gzread(file_, buffer_.data(), static_cast<unsigned>(buffer_.size()));
    if (n < 0) {
      int err = 0;
      throw IoError(std::string("gzip read failed: ") + gzerror(file_, &err));
    }
    if (n == 0) return traits_type::eof();
    setg(buffer_.data(), buffer_.data(), buffer_.data() + n);
    return traits_type::to_int_type(*gptr());
  }

 private:
  gzFile file_;
  std::array<char, 1 << 16> buffer_{};
};

class GzipIstream : public std::istream {
 public:
  explicit GzipIstream(const std::filesystem::path& path)
      : std::istream(nullptr), buf_(std::make_unique<GzipStreambuf>(path)) {
    rdbuf(buf_.get());
  }

 private:
  std::unique_ptr<GzipStreambuf> buf_;
};

}  // namespace

std::unique_ptr<std::istream> open_input(const std::filesystem::path& path) {
  unsigned char magic[2] = {0, 0};
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path.string());
    probe.read(reinterpret_cast<char*>(magic), 2);
  }
  if (magic[0] == 0x1f && magic[1] == 0x8b) return std::make_unique<GzipIstream>(path);
  auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace botsift
