#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "cogspeech/audio.hpp"
#include "cogspeech/csv.hpp"
#include "cogspeech/dsp.hpp"
#include "cogspeech/error.hpp"

namespace cogspeech {

namespace {

uint32_t read_u32(const std::string &data, size_t pos) {
  return static_cast<uint32_t>(static_cast<unsigned char>(data[pos])) |
         static_cast<uint32_t>(static_cast<unsigned char>(data[pos + 1])) << 8 |
         static_cast<uint32_t>(static_cast<unsigned char>(data[pos + 2])) << 16 |
         static_cast<uint32_t>(static_cast<unsigned char>(data[pos + 3])) << 24;
}

uint16_t read_u16(const std::string &data, size_t pos) {
  return static_cast<uint16_t>(static_cast<unsigned char>(data[pos]) |
                               static_cast<unsigned char>(data[pos + 1]) << 8);
}

struct WavFormat {
  uint16_t codec = 0;  // 1 = PCM int, 3 = IEEE float
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
};

double decode_sample(const char *p, const WavFormat &fmt) {
  switch (fmt.codec) {
    case 1:
      switch (fmt.bits) {
        case 8:  // unsigned
          return (static_cast<int>(static_cast<unsigned char>(p[0])) - 128) /
                 128.0;
        case 16: {
          int16_t v;
          std::memcpy(&v, p, 2);
          return v / 32768.0;
        }
        case 24: {
          int32_t v = static_cast<unsigned char>(p[0]) |
                      static_cast<unsigned char>(p[1]) << 8 |
                      static_cast<unsigned char>(p[2]) << 16;
          if (v & 0x800000) v |= ~0xffffff;  // sign extend
          return v / 8388608.0;
        }
        case 32: {
          int32_t v;
          std::memcpy(&v, p, 4);
          return v / 2147483648.0;
        }
        default:
          throw ParseError("wav: unsupported PCM bit depth " +
                           std::to_string(fmt.bits));
      }
    case 3:
      if (fmt.bits == 32) {
        float v;
        std::memcpy(&v, p, 4);
        return v;
      }
      if (fmt.bits == 64) {
        double v;
        std::memcpy(&v, p, 8);
        return v;
      }
      throw ParseError("wav: unsupported float bit depth " +
                       std::to_string(fmt.bits));
    default:
      throw ParseError("wav: unsupported encoding (format tag " +
                       std::to_string(fmt.codec) + ")");
  }
}

}  // namespace

AudioSignal read_audio(const std::filesystem::path &path) {
  std::string data;
  try {
    data = read_text_file(path);
  } catch (const IoError &) {
    throw IoError("audio file not found or unreadable: " + path.string());
  }
  if (data.size() < 44 || data.compare(0, 4, "RIFF") != 0 ||
      data.compare(8, 4, "WAVE") != 0)
    throw ParseError("not a RIFF/WAVE file: " + path.string());

  WavFormat fmt;
  bool have_fmt = false;
  size_t data_pos = 0, data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const std::string id = data.substr(pos, 4);
    const uint32_t len = read_u32(data, pos + 4);
    const size_t body = pos + 8;
    if (body + len > data.size())
      throw ParseError("wav: truncated chunk '" + id + "' in " + path.string());
    if (id == "fmt ") {
      if (len < 16) throw ParseError("wav: short fmt chunk");
      fmt.codec = read_u16(data, body);
      fmt.channels = read_u16(data, body + 2);
      fmt.sample_rate = read_u32(data, body + 4);
      fmt.bits = read_u16(data, body + 14);
      if (fmt.codec == 0xfffe) {  // WAVE_FORMAT_EXTENSIBLE
        if (len < 40) throw ParseError("wav: short extensible fmt chunk");
        fmt.codec = read_u16(data, body + 24);  // first 2 bytes of sub-format
      }
      have_fmt = true;
    } else if (id == "data") {
      data_pos = body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw ParseError("wav: missing fmt chunk: " + path.string());
  if (data_pos == 0) throw ParseError("wav: missing data chunk: " + path.string());
  if (fmt.channels == 0 || fmt.sample_rate == 0)
    throw ParseError("wav: bad fmt values: " + path.string());

  const size_t bytes_per_sample = fmt.bits / 8;
  const size_t stride = bytes_per_sample * fmt.channels;
  if (stride == 0) throw ParseError("wav: zero frame stride");
  const size_t frames = data_len / stride;
  if (frames == 0) throw ParseError("wav: zero-length audio: " + path.string());

  AudioSignal out;
  out.sample_rate = static_cast<int>(fmt.sample_rate);
  out.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (size_t c = 0; c < fmt.channels; ++c)
      acc += decode_sample(&data[data_pos + i * stride + c * bytes_per_sample],
                           fmt);
    out.samples[i] = std::clamp(acc / fmt.channels, -1.0, 1.0);
  }

  if (out.sample_rate != kPipelineRate) {
    out.samples = resample_sinc(out.samples, out.sample_rate, kPipelineRate);
    out.sample_rate = kPipelineRate;
    for (auto &s : out.samples) s = std::clamp(s, -1.0, 1.0);
  }
  return out;
}

void write_wav_channels(const std::filesystem::path &path,
                        const std::vector<std::vector<double>> &channels,
                        int sample_rate) {
  if (channels.empty() || channels[0].empty())
    throw ValidationError("write_wav: no samples");
  const size_t frames = channels[0].size();
  for (const auto &ch : channels)
    if (ch.size() != frames)
      throw ValidationError("write_wav: channel length mismatch");

  const uint16_t n_ch = static_cast<uint16_t>(channels.size());
  const uint32_t data_len = static_cast<uint32_t>(frames * n_ch * 2);
  std::string out;
  out.reserve(44 + data_len);
  auto put_u32 = [&out](uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto put_u16 = [&out](uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
  };
  out += "RIFF";
  put_u32(36 + data_len);
  out += "WAVEfmt ";
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(n_ch);
  put_u32(static_cast<uint32_t>(sample_rate));
  put_u32(static_cast<uint32_t>(sample_rate) * n_ch * 2);
  put_u16(static_cast<uint16_t>(n_ch * 2));
  put_u16(16);
  out += "data";
  put_u32(data_len);
  for (size_t i = 0; i < frames; ++i) {
    for (const auto &ch : channels) {
      const double v = std::clamp(ch[i], -1.0, 1.0);
      const int16_t q = static_cast<int16_t>(
          std::clamp(std::lround(v * 32768.0), -32768L, 32767L));
      put_u16(static_cast<uint16_t>(q));
    }
  }
  write_text_file(path, out);
}

void write_wav(const std::filesystem::path &path, const AudioSignal &signal) {
  write_wav_channels(path, {signal.samples}, signal.sample_rate);
}

AudioSignal slice(const AudioSignal &signal, const SegmentSpan &span) {
  const long n = static_cast<long>(signal.samples.size());
  long a = std::lround(span.start_s * signal.sample_rate);
  long b = std::lround(span.end_s * signal.sample_rate);
  a = std::clamp(a, 0L, n);
  b = std::clamp(b, a, n);
  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  out.samples.assign(signal.samples.begin() + a, signal.samples.begin() + b);
  return out;
}

}  // namespace cogspeech
