class Pipeline:
    """
    A named experiment stage. Mirrors a blueprint: the module creates one,
    then registers its body with the ``runner`` decorator.
    """

    def __init__(self, name, import_name, needs=('table',)):
        self.name = name
        self.import_name = import_name
        self.needs = tuple(needs)
        self.func = None

    def runner(self, func):
        self.func = func
        return func

    def __call__(self, context, writer):
        return self.func(context, writer)

    def __repr__(self):
        return f'<Pipeline {self.name}>'
