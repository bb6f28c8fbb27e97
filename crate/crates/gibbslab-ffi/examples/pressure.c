/* Pressure of the two-state full shift through the C interface. */
#include <stdio.h>
#include "gibbslab.h"

int main(void) {
    const char *src = "[meta]\nname = two\n[A]\n11\n11\n[B]\n11\n11\n[phi]\nall : 0\n";
    GlModel *m = NULL;
    if (gl_model_parse(src, &m) != GL_STATUS_OK) {
        char buf[256];
        gl_last_error(buf, sizeof buf);
        fprintf(stderr, "%s\n", buf);
        return 1;
    }
    double p = 0.0;
    GlStatus s = gl_pressure(m, 1e-3, &p);
    gl_model_free(m);
    if (s != GL_STATUS_OK) {
        return 1;
    }
    printf("%.15f\n", p);
    return 0;
}
