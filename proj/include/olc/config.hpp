// Copyright 2026 The olc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OLC_CONFIG_HPP_
#define OLC_CONFIG_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace olc::cfg {

// INI-style config: [section] headers, key = value lines, '#'/';' comments.
class Config {
 public:
  static Config parse(std::istream& is);
  static Config parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_num(const std::string& section, const std::string& key,
                 double fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  // Whitespace/comma separated numbers.
  std::vector<double> get_list(const std::string& section,
                               const std::string& key) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections()
      const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

// "3", "0..9", or "1,4,7".
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec);

}  // namespace olc::cfg

#endif  // OLC_CONFIG_HPP_
