/*
 * Copyright 2026 The mailbridge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace mailbridge::cli
{

/**
`mailbridge --config PATH --mode type1|type2|pipe [--once | --interval SECONDS]
[--state PATH] [--rcpt JID] [--dry-run] [--verbose]`

Log lines go to `err`. Checker modes print the run summary (or, with
--dry-run, one decision per message) to `out`; pipe mode prints nothing to
`out` unless --dry-run is given.
**/
int main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

/// Same, with `args` holding the arguments after the program name.
int main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace mailbridge::cli
