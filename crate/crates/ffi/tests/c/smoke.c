#include <stdio.h>
#include <string.h>
#include "corrlab.h"

#define CHECK(x) do { if ((x) != CORRLAB_STATUS_OK) { fprintf(stderr, "line %d: %d\n", __LINE__, (int)(x)); return 1; } } while (0)

int main(void) {
    CorrlabCorrespondence *f = NULL;
    CorrlabComplex a = {4.53926, 0.439437}, k = {0.9, 0.1};
    CHECK(corrlab_mating_family_new(a, k, &f));
    CorrlabPoint z = {0.1, 0.2, false}, img[8];
    size_t n = 0;
    CHECK(corrlab_forward_image(f, z, img, 8, &n));
    corrlab_correspondence_free(f);
    if (n != 2) return 2;

    CorrlabHecke *h = NULL;
    CHECK(corrlab_hecke_standard_new(2, &h));
    CorrlabPoint w;
    CHECK(corrlab_hecke_apply_word(h, "s", (CorrlabPoint){2.0, 0.0, false}, &w));
    if (w.is_infinity || w.re > -0.49 || w.re < -0.51) return 3;
    if (corrlab_hecke_apply_word(h, "x", z, &w) != CORRLAB_STATUS_CONFIG) return 4;
    char msg[256];
    if (corrlab_last_error_message(msg, sizeof msg) == 0 || strlen(msg) == 0) return 5;
    corrlab_hecke_free(h);

    const char *job = "{\"schema_version\":1,\"kind\":\"filled_julia\","
        "\"params\":{\"poly\":[[-1,0],[0,0],[1,0]]},"
        "\"grid\":{\"center\":[0,0],\"width\":4,\"pixels_x\":9,\"pixels_y\":9}}";
    CorrlabRaster *r = NULL;
    CHECK(corrlab_render_job_json(job, 1, &r));
    const uint8_t *classes;
    size_t len;
    CHECK(corrlab_raster_classes(r, &classes, &len));
    if (len != 81 || classes[40] != 1 || classes[0] != 0) return 6;
    corrlab_raster_free(r);
    printf("ok\n");
    return 0;
}
