#include "hawkes_ls/event_log.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "hawkes_ls/error.hpp"
#include "hawkes_ls/spec_io.hpp"
#include "hawkes_ls/text.hpp"

namespace hawkes_ls {

std::size_t EventLog::total() const noexcept {
  std::size_t n = 0;
  for (const auto& t : times) n += t.size();
  return n;
}

std::size_t EventLog::count_until(std::size_t k, double t) const {
  const auto& tk = times.at(k);
  return static_cast<std::size_t>(std::upper_bound(tk.begin(), tk.end(), t) - tk.begin());
}

void EventLog::check_invariants() const {
  std::vector<double> all;
  all.reserve(total());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto& tk = times[k];
    for (std::size_t i = 0; i < tk.size(); ++i) {
      if (!(tk[i] > 0.0) || !(tk[i] <= horizon))
        throw InvalidLog("event time " + format_double(tk[i]) + " of component " +
                         std::to_string(k) + " lies outside (0, " + format_double(horizon) +
                         "]");
      if (i > 0 && !(tk[i] > tk[i - 1]))
        throw InvalidLog("event times of component " + std::to_string(k) +
                         " are not strictly increasing");
    }
    all.insert(all.end(), tk.begin(), tk.end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw InvalidLog("two components share an event time");
}

namespace {

struct Chronological {
  double time;
  std::size_t component;
  bool operator>(const Chronological& o) const {
    return time != o.time ? time > o.time : component > o.component;
  }
};

}  // namespace

void write_csv(const EventLog& log, std::ostream& out) {
  out << "# spec_hash=" << hash_hex(log.spec_hash) << '\n';
  out << "# seed=" << log.seed << '\n';
  out << "# generator=" << log.generator << '\n';
  out << "# horizon=" << format_double(log.horizon) << '\n';
  out << "# p=" << log.dim() << '\n';
  out << "component,time\n";
  std::vector<std::size_t> next(log.dim(), 0);
  std::priority_queue<Chronological, std::vector<Chronological>, std::greater<>> heap;
  for (std::size_t k = 0; k < log.dim(); ++k)
    if (!log.times[k].empty()) heap.push({log.times[k][0], k});
  while (!heap.empty()) {
    const auto [t, k] = heap.top();
    heap.pop();
    out << k << ',' << format_double(t) << '\n';
    if (++next[k] < log.times[k].size()) heap.push({log.times[k][next[k]], k});
  }
}

EventLog read_csv(std::istream& in) {
  EventLog log;
  std::string line;
  bool have_p = false;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      try {
        if (key == "spec_hash") {
          log.spec_hash = std::stoull(value, nullptr, 16);
        } else if (key == "seed") {
          log.seed = std::stoull(value);
        } else if (key == "generator") {
          log.generator = value;
        } else if (key == "horizon") {
          log.horizon = parse_double(value);
        } else if (key == "p") {
          log.times.assign(std::stoul(value), {});
          have_p = true;
        }
      } catch (const std::exception& e) {
        throw InvalidLog("bad CSV header line \"" + line + "\": " + e.what());
      }
      continue;
    }
    if (!have_columns) {
      if (line != "component,time") throw InvalidLog("expected \"component,time\" header");
      have_columns = true;
      continue;
    }
    if (!have_p) throw InvalidLog("CSV event log lacks the \"# p=\" header");
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidLog("bad CSV row \"" + line + "\"");
    std::size_t k = 0;
    double t = 0.0;
    try {
      k = std::stoul(line.substr(0, comma));
      t = parse_double(std::string_view(line).substr(comma + 1));
    } catch (const std::exception&) {
      throw InvalidLog("bad CSV row \"" + line + "\"");
    }
    if (k >= log.times.size()) throw InvalidLog("component index out of range in CSV row");
    log.times[k].push_back(t);
  }
  log.check_invariants();
  return log;
}

namespace {

constexpr char kMagic[8] = {'H', 'W', 'K', 'S', 'L', 'O', 'G', '1'};

template <class T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw InvalidLog("truncated binary event log");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= U{bytes[i]} << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_binary(const EventLog& log, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put_le(out, static_cast<std::uint32_t>(log.dim()));
  put_le(out, log.spec_hash);
  put_le(out, log.seed);
  put_le(out, log.horizon);
  put_le(out, static_cast<std::uint32_t>(log.generator.size()));
  out.write(log.generator.data(), static_cast<std::streamsize>(log.generator.size()));
  for (const auto& tk : log.times) {
    put_le(out, static_cast<std::uint64_t>(tk.size()));
    for (double t : tk) put_le(out, t);
  }
}

EventLog read_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw InvalidLog("not a HWKSLOG1 binary event log");
  EventLog log;
  const auto p = get_le<std::uint32_t>(in);
  log.spec_hash = get_le<std::uint64_t>(in);
  log.seed = get_le<std::uint64_t>(in);
  log.horizon = get_le<double>(in);
  const auto tag_len = get_le<std::uint32_t>(in);
  if (tag_len > 1024) throw InvalidLog("implausible generator tag length");
  log.generator.resize(tag_len);
  if (!in.read(log.generator.data(), tag_len)) throw InvalidLog("truncated binary event log");
  log.times.resize(p);
  for (auto& tk : log.times) {
    const auto n = get_le<std::uint64_t>(in);
    if (n > (std::uint64_t{1} << 40)) throw InvalidLog("implausible event count");
    tk.reserve(static_cast<std::size_t>(n));
    for (std::uint64_t i = 0; i < n; ++i) tk.push_back(get_le<double>(in));
  }
  log.check_invariants();
  return log;
}

}  // namespace hawkes_ls
