#include <stdio.h>
#include <string.h>

#include "secgame.h"

static const char *GAME =
    "{\"k_a\": 3, \"k_d\": 2, \"targets\": ["
    "{\"uac\": \"2/3\", \"uau\": \"8/7\", \"udc\": \"-1\", \"udu\": \"-8/5\"},"
    "{\"uac\": \"4/5\", \"uau\": \"6/5\", \"udc\": \"-2\", \"udu\": \"-27/10\"},"
    "{\"uac\": \"1/2\", \"uau\": \"4/3\", \"udc\": \"-3\", \"udu\": \"-39/10\"},"
    "{\"uac\": \"3/4\", \"uau\": \"2\", \"udc\": \"-4\", \"udu\": \"-24/5\"}]}";

int main(void) {
    SecgameGame *game = NULL;
    SecgameEquilibrium *eq = NULL;
    char *json = NULL;

    if (secgame_game_from_json(GAME, 1, &game) != SECGAME_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", secgame_last_error());
        return 1;
    }
    if (secgame_solve(game, 0, &eq) != SECGAME_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", secgame_last_error());
        return 1;
    }
    if (secgame_equilibrium_to_json(eq, &json) != SECGAME_STATUS_OK) {
        return 1;
    }
    if (strstr(json, "\"v_d\":\"-11232/1375\"") == NULL) {
        fprintf(stderr, "unexpected document: %s\n", json);
        return 1;
    }
    printf("%s\n", json);

    secgame_string_free(json);
    secgame_equilibrium_free(eq);
    secgame_game_free(game);

    if (secgame_game_from_json("{", 0, &game) != SECGAME_STATUS_INVALID_INPUT) {
        return 1;
    }
    return secgame_last_error() == NULL;
}
