// SPDX-License-Identifier: Apache-2.0
//
// cmamimo: characteristic-mode degrees-of-freedom analysis for MIMO antennas
// Copyright (C) 2026 The cmamimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CMAMIMO_LOG_HPP
#define CMAMIMO_LOG_HPP

#include <atomic>
#include <iostream>
#include <mutex>
#include <string_view>

namespace cmamimo::log
{
    inline std::atomic<bool> &warnings_enabled()
    {
        static std::atomic<bool> enabled{true};
        return enabled;
    }

    inline std::atomic<long> &warning_count()
    {
        static std::atomic<long> count{0};
        return count;
    }

    inline void warn(std::string_view msg)
    {
        ++warning_count();
        if (!warnings_enabled())
            return;
        static std::mutex mtx;
        std::lock_guard lock(mtx);
        std::cerr << "warning: " << msg << '\n';
    }
}

#endif
