# Having a conftest here puts tests/ on sys.path so the helper modules
# (mms_utils) import cleanly regardless of invocation directory.
