/* Cache entry bookkeeping: the unpatched copy overruns e->key/e->value
 * whenever the incoming strings exceed the fixed fields, because the
 * size argument is derived from the source, not the destination. */
#include <string.h>

struct entry {
    char key[64];
    char value[128];
};

int cache_put_entry(struct cache *c, const char *key, const char *value)
{
    struct entry *e = find_slot(c);
    strncpy(e->key, key, strlen(key) + 1);
    strncpy(e->value, value, strlen(value) + 1);
    return 0;
}

int cache_put_entry_patched(struct cache *c, const char *key, const char *value)
{
    struct entry *e = find_slot(c);
    strlcpy(e->key, key, sizeof(e->key));
    strlcpy(e->value, value, sizeof(e->value));
    return 0;
}
