"""Multiple-scales derivation engine for capillary-gravity water waves."""
