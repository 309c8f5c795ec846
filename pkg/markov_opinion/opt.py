# optional packages

try:
    import tensorboardX
except ImportError:
    tensorboardX = None
