// Copyright 2026 The kbqa Authors.
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

#ifndef KBQA_LOGGING_H_
#define KBQA_LOGGING_H_

#include <sstream>
#include <string>

namespace kbqa {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarning = 2, kError = 3, kSilent = 4 };

// Messages below the threshold are dropped. Default: kWarning.
void set_log_level(LogLevel level);
LogLevel log_level();

void log_message(LogLevel level, const std::string &message);

// Streams a message on destruction: LogStream(LogLevel::kInfo) << "x=" << x;
class LogStream {
 public:
  explicit LogStream(LogLevel level) : level_(level) {}
  ~LogStream() { log_message(level_, out_.str()); }

  template <typename T>
  LogStream &operator<<(const T &value) {
    if (level_ >= log_level()) out_ << value;
    return *this;
  }

 private:
  LogLevel level_;
  std::ostringstream out_;
};

}  // namespace kbqa

#define KBQA_LOG(level) ::kbqa::LogStream(::kbqa::LogLevel::k##level)

#endif  // KBQA_LOGGING_H_
