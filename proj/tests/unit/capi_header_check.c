// Copyright 2026 The dlsvm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dlsvm.h"

#include <stddef.h>

/* Called from the C++ tests so the linker keeps this translation unit. */
int dlsvm_header_check_from_c(void) {
  dlsvm_params* p = NULL;
  int ok = dlsvm_params_create(&p) == DLSVM_OK;
  if (ok) ok = dlsvm_params_set_string(p, "model", "kdl-ocsvm") == DLSVM_OK;
  dlsvm_params_free(p);
  return ok && dlsvm_version() != NULL;
}
