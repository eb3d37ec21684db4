#pragma once

// HTTP client for the GHCN-daily archive with an on-disk cache keyed by
// station id. Include this header only where network access is wanted; it
// pulls in cpp-httplib.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "httplib.h"
#include "tempdyn/error.hpp"

namespace tempdyn::ghcn {

struct FetchOptions {
  bool offline = false;  // never touch the network
  bool refresh = false;  // ignore a cache hit and download again
  int timeout_seconds = 60;
};

struct FetchResult {
  std::string bytes;
  bool from_cache = false;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-to-temp-then-rename so concurrent readers never see partial files.
inline void write_file_atomic(const std::filesystem::path& p,
                              const std::string& bytes) {
  std::filesystem::create_directories(p.parent_path());
  std::random_device rd;
  const auto tmp = p.parent_path() /
                   (p.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // leading slash, no trailing slash
};

inline SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint must be an absolute URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

}  // namespace detail

inline std::filesystem::path cache_path(const std::filesystem::path& cache_dir,
                                        const std::string& station_id) {
  return cache_dir / (station_id + ".dly");
}

inline std::string download_station(const std::string& station_id,
                                    const std::string& endpoint,
                                    int timeout_seconds = 60) {
  const auto url = detail::split_url(endpoint);
  httplib::Client client(url.origin);
  client.set_follow_location(true);
  client.set_connection_timeout(timeout_seconds);
  client.set_read_timeout(timeout_seconds);
  const std::string path = url.path + "/" + station_id + ".dly";
  auto res = client.Get(path);
  if (!res) {
    throw FetchError(0, "GET " + endpoint + "/" + station_id +
                            ".dly failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw FetchError(res->status, "GET " + endpoint + "/" + station_id +
                                      ".dly returned HTTP " +
                                      std::to_string(res->status));
  }
  return std::move(res->body);
}

// Returns the station's .dly payload, from cache when present. Network
// payloads are written to the cache before returning.
inline FetchResult fetch_station(const std::string& station_id,
                                 const std::string& endpoint,
                                 const std::filesystem::path& cache_dir,
                                 const FetchOptions& options = {}) {
  const auto cached = cache_path(cache_dir, station_id);
  const bool have_cache = std::filesystem::exists(cached);
  FetchResult result;
  if (have_cache && (!options.refresh || options.offline)) {
    result.bytes = detail::read_file(cached);
    result.from_cache = true;
    return result;
  }
  if (options.offline) {
    throw FetchError(0, "offline and no cached payload for " + station_id +
                            " in " + cache_dir.string());
  }
  result.bytes = download_station(station_id, endpoint, options.timeout_seconds);
  if (have_cache) {
    const std::string old = detail::read_file(cached);
    if (old.size() != result.bytes.size() || old != result.bytes) {
      result.warnings.push_back(
          "cached payload for " + station_id + " differs from the archive (" +
          std::to_string(old.size()) + " vs " +
          std::to_string(result.bytes.size()) +
          " bytes); using the fresh download");
    }
  }
  detail::write_file_atomic(cached, result.bytes);
  return result;
}

}  // namespace tempdyn::ghcn
