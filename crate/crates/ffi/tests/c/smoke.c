#include <stdio.h>
#include <string.h>
#include "funho.h"

int main(void) {
    FunhoAlgebra *a = NULL;
    if (funho_algebra_new("trunc:2", "f2", 0, &a) != FUNHO_STATUS_OK) {
        fprintf(stderr, "new: %s\n", funho_last_error_message());
        return 1;
    }
    size_t dims[4];
    if (funho_homology_dims(a, "hh", 3, dims, 4) != FUNHO_STATUS_OK) return 2;
    printf("%zu %zu %zu %zu\n", dims[0], dims[1], dims[2], dims[3]);
    FunhoAlgebra *bad = NULL;
    FunhoStatus s = funho_algebra_new("trunc:x", "q", 0, &bad);
    if (s != FUNHO_STATUS_INVALID_INPUT || bad != NULL) return 3;
    if (strstr(funho_last_error_message(), "trunc:x") == NULL) return 4;
    funho_algebra_free(a);
    return 0;
}
