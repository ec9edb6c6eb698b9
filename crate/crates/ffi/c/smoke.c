#include <stdio.h>
#include "wittscaffold.h"

int main(void) {
    WsParams params = ws_reference_params();
    WsAnalysis *handle = NULL;
    WsErrorCode rc = ws_analyze(&params, &handle);
    if (rc != WS_ERROR_CODE_OK) {
        char *msg = ws_last_error_message();
        fprintf(stderr, "analyze failed (%d): %s\n", rc, msg ? msg : "?");
        ws_string_free(msg);
        return 1;
    }
    int64_t b1 = 0, b2 = 0;
    bool free_module = false;
    ws_analysis_breaks(handle, &b1, &b2);
    ws_analysis_is_free(handle, &free_module);
    printf("b1=%lld b2=%lld free=%d\n", (long long)b1, (long long)b2, free_module);
    ws_analysis_free(handle);

    params.a1_exp = -2;
    return ws_validate(&params) == WS_ERROR_CODE_VALIDATION ? 0 : 2;
}
