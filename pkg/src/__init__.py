# LIVE multi-robot search simulator
